import numpy as np
import pytest

from snntune.analysis import (
    compute_statistics,
    damping_ratio,
    isolated_spike_count,
    poisson_conformance,
    statistics_csv_rows,
    wta_index,
)
from snntune.exceptions import ConfigurationError, InputDomainError
from snntune.recording import PopulationInfo, Recording


def make_recording(events, size, duration_ms=1000.0, dt_ms=1.0, pop="p"):
    ev = np.array(events, dtype=np.int64) if len(events) else np.empty((0, 2), dtype=np.int64)
    return Recording(
        meta={"spec_hash": "x", "seed": 0, "dt_ms": dt_ms, "duration_ms": duration_ms,
              "complete": True, "wall_clock_s": 0.0},
        populations={pop: PopulationInfo(id=pop, size=size, model="lif")},
        events={pop: ev},
    )


class TestComputeStatistics:
    def test_periodic_train_has_zero_cv(self):
        rec = make_recording([(k, 0) for k in range(0, 1000, 10)], size=1)
        st = compute_statistics(rec, "p")
        assert st.isi_cv[0] == 0.0
        assert st.isi_mean_ms[0] == 10.0

    def test_empty_raster_degenerate_fields(self):
        rec = make_recording([], size=5)
        st = compute_statistics(rec, "p")
        assert (st.rate_hz == 0).all()
        assert np.isnan(st.isi_cv).all()
        assert st.fano == 0.0 and st.fano_insufficient_data
        assert st.concentration is None

    def test_rate_consistency_exact(self):
        rec = make_recording([(k, 1) for k in (3, 77, 400)], size=3)
        st = compute_statistics(rec, "p")
        duration_s = rec.duration_ms / 1000.0
        counts = rec.spike_counts("p")
        assert (st.rate_hz * duration_s == counts).all()

    def test_neurons_with_single_spike_excluded_from_isi(self):
        rec = make_recording([(5, 0), (1, 1), (9, 1)], size=2)
        st = compute_statistics(rec, "p")
        assert np.isnan(st.isi_cv[0]) and not np.isnan(st.isi_cv[1])

    def test_poisson_raster_fano(self):
        # poisson_step-style train at f_e=100, dt=1: window counts follow
        # Binomial(1000, 0.1), so fano lands near the oracle 0.9, inside 1+-0.15
        rng = np.random.default_rng(20)
        size, steps = 100, 20_000
        events = []
        for neuron in range(size):
            spikes = np.flatnonzero(rng.random(steps) < 0.1)
            events.extend((int(s), neuron) for s in spikes)
        rec = make_recording(events, size=size, duration_ms=float(steps))
        st = compute_statistics(rec, "p", window_ms=1000.0)
        assert abs(st.fano - 1.0) < 0.15
        assert abs(st.fano - 0.9) < 0.05

    def test_recompute_reproduces_values(self):
        rng = np.random.default_rng(21)
        events = [(int(s), int(n)) for s, n in zip(rng.integers(0, 1000, 500), rng.integers(0, 20, 500))]
        rec = make_recording(events, size=20)
        a = compute_statistics(rec, "p")
        b = compute_statistics(rec, "p")
        np.testing.assert_array_equal(a.rate_hz, b.rate_hz)
        assert a.fano == b.fano and a.concentration == b.concentration

    def test_unknown_population(self):
        rec = make_recording([], size=5)
        with pytest.raises(ConfigurationError):
            compute_statistics(rec, "ghost")

    def test_rate_profile_windows(self):
        rec = make_recording([(k, 0) for k in range(100)], size=1, duration_ms=1000.0)
        st = compute_statistics(rec, "p", window_ms=100.0)
        assert st.rate_profile.shape == (10,)
        assert st.rate_profile[0] == pytest.approx(1000.0)  # 100 spikes in 0.1 s
        assert st.rate_profile[-1] == 0.0


class TestPoissonConformance:
    def test_true_poisson_accepted_in_most_trials(self):
        # self-calibration: true Poisson(10) data should pass at >= 98%
        rng = np.random.default_rng(22)
        passes = sum(
            poisson_conformance(rng.poisson(10.0, 10_000), 10.0)["p_value"] > 0.01
            for _ in range(50)
        )
        assert passes >= 47

    def test_rejection_rate_at_nominal_alpha(self):
        # rejects true-Poisson data at <= ~1%; allow slack for 200 trials
        rng = np.random.default_rng(23)
        rejects = sum(
            poisson_conformance(rng.poisson(7.0, 2_000), 7.0)["p_value"] <= 0.01
            for _ in range(200)
        )
        assert rejects <= 8

    def test_constant_counts_rejected(self):
        counts = np.full(1000, 10)
        out = poisson_conformance(counts, 10.0)
        assert out["p_value"] < 1e-6
        assert out["fano"] == 0.0

    def test_every_step_spiking_rejected(self):
        # bernoulli at x=1 with f_hat=1: every window holds exactly
        # window-length events, a zero-variance train
        counts = np.full(500, 1000)
        out = poisson_conformance(counts, 1000.0)
        assert out["p_value"] < 1e-6

    def test_needs_enough_windows(self):
        with pytest.raises(InputDomainError):
            poisson_conformance(np.arange(50), 5.0)


class TestWTAIndex:
    def test_single_winner(self):
        rec = make_recording([(k, 3) for k in range(50)], size=10)
        assert wta_index(rec, "p") == 1.0

    def test_uniform_activity(self):
        events = [(k, n) for n in range(10) for k in range(5)]
        rec = make_recording(events, size=10)
        assert wta_index(rec, "p") == pytest.approx(0.1)

    def test_no_events_absent(self):
        rec = make_recording([], size=10)
        assert wta_index(rec, "p") is None

    def test_needs_ten_neurons(self):
        rec = make_recording([], size=5)
        with pytest.raises(ConfigurationError):
            wta_index(rec, "p")

    def test_uniform_lower_bound_holds_off_multiples_of_ten(self):
        # top decile rounds up, so uniform activity stays at >= 0.1 even when
        # the population size is not a multiple of ten
        events = [(k, n) for n in range(15) for k in range(4)]
        rec = make_recording(events, size=15)
        assert wta_index(rec, "p") >= 0.1

    def test_adding_to_top_neuron_never_decreases(self):
        rng = np.random.default_rng(24)
        events = [(int(s), int(n)) for s, n in zip(rng.integers(0, 900, 300), rng.integers(0, 20, 300))]
        rec = make_recording(events, size=20)
        base = wta_index(rec, "p")
        counts = rec.spike_counts("p")
        top = int(np.argmax(counts))
        for extra in range(1, 6):
            rec2 = make_recording(events + [(900 + k, top) for k in range(extra)], size=20)
            now = wta_index(rec2, "p")
            assert now >= base
            base = now


class TestDampingRatio:
    def test_stationary_near_one(self):
        rng = np.random.default_rng(25)
        events = [(int(s), int(n)) for s, n in zip(rng.integers(0, 1000, 4000), rng.integers(0, 10, 4000))]
        rec = make_recording(events, size=10)
        assert damping_ratio(rec, "p") == pytest.approx(1.0, abs=0.1)

    def test_growing_rate_above_one(self):
        events = [(k, 0) for k in range(500, 1000)]
        events += [(k, 0) for k in range(0, 500, 10)]
        rec = make_recording(events, size=1)
        assert damping_ratio(rec, "p") > 1.0

    def test_zero_first_half_absent(self):
        rec = make_recording([(900, 0)], size=1)
        assert damping_ratio(rec, "p") is None


class TestIsolatedSpikes:
    def test_counts_single_event_neurons(self):
        rec = make_recording([(1, 0), (2, 1), (3, 1), (4, 2)], size=4)
        assert isolated_spike_count(rec, "p") == 2


class TestCsvExport:
    def test_row_per_population_metric(self):
        rec = make_recording([(k, 0) for k in range(0, 100, 10)], size=10)
        st = compute_statistics(rec, "p")
        rows = statistics_csv_rows({"p": st})
        assert rows[0] == "population,metric,value"
        assert any(r.startswith("p,mean_rate_hz,") for r in rows)
        assert any(r.startswith("p,fano,") for r in rows)
