#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpp/envlaw.hpp"
#include "lpp/field.hpp"
#include "lpp/passage.hpp"
#include "lpp/shapes.hpp"

namespace lpp {

// Replica uniform-stream layout: replica r draws its environment from
// stream env_stream(r) and its weights from weight_stream(r), so replicas
// are independent and order-insensitive under one base seed.
inline std::uint64_t env_stream(std::uint64_t replica) { return 3 * replica; }
inline std::uint64_t weight_stream(std::uint64_t replica) { return 3 * replica + 1; }
inline std::uint64_t aux_stream(std::uint64_t replica) { return 3 * replica + 2; }

int max_worker_threads();
void set_max_worker_threads(int threads);  // 0 = hardware default

struct McEstimate {
    double estimate = 0.0;
    double se = 0.0;
    std::vector<double> replica_values;  // indexed by replica
    double wall_seconds = 0.0;
};

// Replica-averaged scaled last-passage estimate of Psi(x, y) at scale n.
McEstimate mc_scaled_estimate(const EnvironmentLaw& law, Geometry geometry,
                              Convention convention, double x, double y,
                              std::int64_t n, int replicas, std::uint64_t seed);

// Serial reference path: identical numbers, no thread pool.  Kept so tests
// can pin the parallel kernels against it bit for bit.
McEstimate mc_scaled_estimate_serial(const EnvironmentLaw& law, Geometry geometry,
                                     Convention convention, double x, double y,
                                     std::int64_t n, int replicas,
                                     std::uint64_t seed);

// Exact-shape column for an MC point, when an evaluator applies to the law
// and geometry.
std::optional<ShapeResult> theory_value(const EnvironmentLaw& law,
                                        Geometry geometry, double x, double y);

enum class AlphaAxis { XisAlpha, YisAlpha };

struct SweepRow {
    double alpha = 0.0;
    McEstimate mc;
    std::optional<ShapeResult> theory;
    std::optional<double> asymptotic;
    std::optional<double> upper_bound;
};

std::vector<SweepRow> boundary_sweep(const EnvironmentLaw& law, Geometry geometry,
                                     Convention convention, AlphaAxis axis,
                                     const std::vector<double>& alphas,
                                     std::int64_t n, int replicas,
                                     std::uint64_t seed);

struct InterchangeReport {
    std::size_t samples = 0;
    double mean_a = 0.0, mean_b = 0.0;
    double se_a = 0.0, se_b = 0.0;
    double mean_gap = 0.0;          // |mean_a - mean_b|
    double mean_gap_limit = 0.0;    // 3 combined SEs
    double ks_distance = 0.0;
    double ks_limit = 0.0;          // 1.63 / sqrt(samples)
    bool means_ok = false;
    bool ks_ok = false;
    bool pass() const { return means_ok && ks_ok; }
};

// Samples T(cols-1, rows-1) (endpoint included, queueing semantics) under
// two orderings of the exponential service rates, coupled through shared
// uniforms, and compares the empirical laws.
InterchangeReport interchange_test(const std::vector<double>& rates_a,
                                   const std::vector<double>& rates_b,
                                   std::int64_t grid_cols, std::int64_t grid_rows,
                                   std::size_t samples, std::uint64_t seed);

struct CouplingGapReport {
    double psi_f = 0.0, psi_g = 0.0;
    double mu_f = 0.0, mu_g = 0.0;
    double gap = 0.0;       // |psi_f - psi_g - (mu_f - mu_g)|
    double gap_se = 0.0;    // paired-difference SE
    double bound = 0.0;     // numerically integrated coupling bound
    bool pass = false;      // gap <= bound + 3 se
};

CouplingGapReport coupling_gap_test(const EnvironmentLaw& law_f,
                                    const EnvironmentLaw& law_g, double alpha,
                                    std::int64_t n, int replicas,
                                    std::uint64_t seed);

// The two integrals of the coupling bound:
//   8 sqrt(alpha) int (E|F-G|)^(1/2) dx + alpha int esssup|F-G| dx.
double coupling_bound(const EnvironmentLaw& law_f, const EnvironmentLaw& law_g,
                      double alpha);

// Sum weights over 1 x r (or r x 1) blocks of an existing field.
enum class BlockOrientation { Rows, Columns };
class CoarseField {
  public:
    CoarseField(const WeightField& base, std::int64_t r, BlockOrientation o)
        : base_(&base), r_(r), orientation_(o) {}
    std::int64_t r() const { return r_; }
    double operator()(std::int64_t i, std::int64_t j) const {
        double s = 0.0;
        for (std::int64_t k = 0; k < r_; ++k)
            s += orientation_ == BlockOrientation::Rows ? (*base_)(i, r_ * j + k)
                                                        : (*base_)(r_ * i + k, j);
        return s;
    }

  private:
    const WeightField* base_;
    std::int64_t r_;
    BlockOrientation orientation_;
};

struct CoarsenReport {
    double fine = 0.0;    // MC estimate of Psi_F(alpha, 1)
    double coarse = 0.0;  // MC estimate of (1/r) Psi_{F_r}(alpha r, 1)
    double discrepancy = 0.0;
    double bound = 0.0;  // M r sqrt(alpha) (1 + slack)
    bool pass = false;
};

CoarsenReport block_coarsen_compare(const EnvironmentLaw& law, std::int64_t r,
                                    double alpha, std::int64_t n, int replicas,
                                    std::uint64_t seed, double weight_bound_m,
                                    double slack = 0.5);

struct TaggedSpeedReport {
    double speed = 0.0;
    double se = 0.0;
    double theory = 0.0;  // f(u) from the speed functional
    double gap = 0.0;
    bool within_3se = false;
    double truncation_activity = 0.0;  // fraction of replicas pinned at -W
    bool truncation_ok = false;        // activity < 1%
    std::vector<double> replica_speeds;
};

// Tagged-particle speed for the strict-x Bernoulli model: geometric initial
// gaps of mean u, displacement read from the windowed infimum over sources
// i in [-W, 0] with the last-passage inverse on the strip of t rows.
TaggedSpeedReport tagged_particle_speed(const EnvironmentLaw& law, double u,
                                        std::int64_t t, std::int64_t window,
                                        int replicas, std::uint64_t seed);

// Direct (unwindowed within the given range, no pruning) evaluation of the
// defining infimum on small instances; test oracle for the fast path.
double tagged_particle_position_oracle(const EnvironmentLaw& law, double u,
                                       std::int64_t t, std::int64_t window,
                                       std::uint64_t seed, std::uint64_t replica);

}  // namespace lpp
