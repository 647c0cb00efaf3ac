import numpy as np
import pytest

from mielab.css import (NotCssError, check_mie_mi_bound, css_canonical_form,
                        is_sign_free, structure_counts)
from mielab.pauli import PauliString
from mielab.random_states import (random_css_tableau, random_stabilizer_tableau,
                                  random_tripartition)
from mielab.statevector import dense_from_tableau, state_is_sign_free
from mielab.tableau import StabilizerTableau


def from_texts(*texts, rng=0):
    return StabilizerTableau.from_stabilizers(
        [PauliString.from_text(t) for t in texts], rng)


def cluster_state(L, rng=0):
    gens = []
    for i in range(L):
        x = (1 << i) | (1 << ((i + 2) % L))
        z = 1 << ((i + 1) % L)
        gens.append(PauliString(L, x, z, 0))
    return StabilizerTableau.from_stabilizers(gens, rng)


class TestCanonicalForm:
    def test_epr(self):
        form = css_canonical_form(from_texts("+XX", "+ZZ"))
        assert [p.to_text() for p in form.x_generators] == ["+XX"]
        assert [p.to_text() for p in form.z_generators] == ["+ZZ"]
        assert form.z_repairs == ()

    def test_ghz(self):
        form = css_canonical_form(from_texts("+XXX", "+ZZI", "+IZZ"))
        assert form.n_x == 1 and form.n_z == 2
        assert form.x_generators[0].to_text() == "+XXX"

    def test_cluster_not_css(self):
        with pytest.raises(NotCssError):
            css_canonical_form(cluster_state(4))

    def test_minus_state_repair(self):
        form = css_canonical_form(from_texts("-X"))
        assert form.z_repairs == (0,)
        assert form.x_generators[0].to_text() == "+X"

    def test_form_generates_original_group(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            t = random_css_tableau(10, rng)
            form = css_canonical_form(t)
            gens = form.x_generators + form.z_generators
            assert len(gens) == 10
            # each canonical generator stabilizes a state that also has
            # the original generators (up to the recorded Z repairs)
            repaired = t.copy()
            for q in form.z_repairs:
                repaired.apply_gate("Z", q)
            for g in gens:
                assert repaired.measure_pauli(g) == +1


class TestSignFree:
    def test_ghz_sign_free(self):
        assert bool(is_sign_free(from_texts("+XXX", "+ZZI", "+IZZ")))

    def test_minus_state(self):
        rep = is_sign_free(from_texts("-X"))
        assert not rep.sign_free
        assert rep.witness is not None
        assert bool(is_sign_free(from_texts("-X"), allow_z_repairs=True))

    def test_cluster_state_not_sign_free(self):
        rep = is_sign_free(cluster_state(4))
        assert not rep.sign_free

    def test_agrees_with_dense_amplitudes(self):
        rng = np.random.default_rng(11)
        n_checked = 0
        for seed in range(300):
            t = random_stabilizer_tableau(6, np.random.default_rng(seed))
            structural = bool(is_sign_free(t))
            dense = state_is_sign_free(dense_from_tableau(t, rng))
            assert structural == dense, f"seed {seed}"
            n_checked += 1
        assert n_checked == 300

    def test_css_states_always_repairable(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            t = random_css_tableau(12, rng)
            assert bool(is_sign_free(t, allow_z_repairs=True))


class TestStructureCounts:
    def test_ghz(self):
        c = structure_counts(from_texts("+XXX", "+ZZI", "+IZZ"), [0], [1], [2])
        assert (c.g, c.g_prime) == (1, 0)
        assert c.e_ab == c.e_bc == c.e_ca == 0

    def test_ghz_prime(self):
        c = structure_counts(from_texts("+ZZZ", "+XXI", "+IXX"), [0], [1], [2])
        assert (c.g, c.g_prime) == (0, 1)

    def test_epr_with_spectator(self):
        c = structure_counts(from_texts("+XXI", "+ZZI", "+IIZ"), [0], [1], [2])
        assert c.e_ab == 1 and c.s_c == 1
        assert c.g == c.g_prime == 0

    def test_non_partition_rejected(self):
        t = from_texts("+XXX", "+ZZI", "+IZZ")
        with pytest.raises(ValueError):
            structure_counts(t, [0], [1], [1, 2])
        with pytest.raises(ValueError):
            structure_counts(t, [0], [1], [])

    def test_entropy_reconstruction_random(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            n = int(rng.integers(6, 16))
            t = random_css_tableau(n, rng)
            a, b, c = random_tripartition(n, rng)
            counts = structure_counts(t, a, b, c)
            assert t.entropy_bits(a) == (counts.g + counts.g_prime
                                         + counts.e_ab + counts.e_ca)
            assert t.entropy_bits(b) == (counts.g + counts.g_prime
                                         + counts.e_ab + counts.e_bc)
            assert t.mutual_information_bits(a, b) == (
                2 * counts.e_ab + counts.g + counts.g_prime)


class TestBound:
    def test_ghz_report(self):
        rep = check_mie_mi_bound(from_texts("+XXX", "+ZZI", "+IZZ"), [0], [1])
        assert (rep.mie_bits, rep.mi_bits) == (0, 1)
        assert rep.sign_free and rep.holds

    def test_ghz_prime_report(self):
        rep = check_mie_mi_bound(from_texts("+ZZZ", "+XXI", "+IXX"), [0], [1])
        assert (rep.mie_bits, rep.mi_bits) == (1, 1)
        assert rep.sign_free and rep.holds

    def test_epr_report(self):
        rep = check_mie_mi_bound(from_texts("+XXI", "+ZZI", "+IIZ"), [0], [1])
        assert (rep.mie_bits, rep.mi_bits) == (1, 2)

    def test_cluster_violation_allowed(self):
        rep = check_mie_mi_bound(cluster_state(6), [0], [2])
        assert (rep.mie_bits, rep.mi_bits) == (1, 0)
        assert not rep.sign_free and not rep.holds

    def test_cluster_any_even_distance(self):
        t = cluster_state(10)
        for b in (2, 4, 6, 8):
            rep = check_mie_mi_bound(t, [0], [b])
            assert rep.mie_bits == 1 and rep.mi_bits == 0
