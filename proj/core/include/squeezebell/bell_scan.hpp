#pragma once

// CHSH combination of four two-time correlators and 2D sweeps over the
// measurement parameters.

#include <array>
#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "squeezebell/evaluators.hpp"
#include "squeezebell/squeezed_state.hpp"

namespace squeezebell {

/// The four measurement times t_a, t_b, t_a', t_b' and the bin width.
struct BellConfig {
    SqueezeParams a;
    SqueezeParams b;
    SqueezeParams a_prime;
    SqueezeParams b_prime;
    double ell = 1.0;

    TransitionSpec ab() const { return {a, b}; }
    TransitionSpec abp() const { return {a, b_prime}; }
    TransitionSpec apb() const { return {a_prime, b}; }
    TransitionSpec apbp() const { return {a_prime, b_prime}; }

    /// Δθ_ab − Δθ_a'b + Δθ_a'b' − Δθ_ab'; zero up to rounding.
    double chasles_residual() const;
};

enum class BellTerm { ab, abp, apb, apbp };
std::string_view term_name(BellTerm t);

struct BellResult {
    double value = 0;
    std::array<CorrelatorResult, 4> terms{};  ///< indexed by BellTerm
};

/// B = E(a,b) + E(a,b') + E(a',b) − E(a',b') with settings.ell replaced by c.ell.
/// Evaluator errors are rethrown as DomainError naming the failing term.
BellResult bell_terms(const BellConfig& c, const EvaluationSettings& s, Method m = Method::automatic);
double bell_operator(const BellConfig& c, const EvaluationSettings& s, Method m = Method::automatic);

/// A sweepable scalar: one of r/phi/theta of a, b, ap, bp (e.g. "phi_ap"),
/// a rotation difference dtheta_ab, dtheta_apb, dtheta_abp, dtheta_apbp,
/// or ell.
///
/// Differences are imposed by moving one absolute angle with θ_b as anchor:
///   dtheta_ab: θ_a = θ_b + v        dtheta_apb: θ_a' = θ_b + v
///   dtheta_abp: θ_b' = θ_a − v      dtheta_apbp: θ_b' = θ_a' − v
/// applied in that order.
struct Axis {
    std::string name;
    double lo = 0;
    double hi = 1;
    int count = 2;

    double value(int i) const;
};

/// Parses a real number, also accepting multiples of pi written as
/// "pi", "-pi", "0.5pi" or "pi/4". Throws std::invalid_argument.
double parse_real(std::string_view text);

/// Parses "name:lo:hi:n". Throws std::invalid_argument.
Axis parse_axis(std::string_view spec);
bool is_valid_axis_name(std::string_view name);
/// Applies a full assignment of axis values in the canonical order.
BellConfig apply_axes(const BellConfig& base, const std::vector<std::pair<std::string, double>>& values);

enum class Observable { bell, correlator };

struct NodeResult {
    double value = 0;  ///< NaN when the node failed
    std::string method;
    std::string flags;  ///< '|'-separated: degenerate, nudged, weak, error
    std::string error;
};

struct SweepGrid {
    Axis axis1;
    Axis axis2;
    BellConfig fixed;
    std::vector<NodeResult> results;  ///< row-major, index i1·axis2.count + i2
    double max_B = 0;
    std::pair<double, double> argmax{0, 0};

    const NodeResult& at(int i1, int i2) const { return results[static_cast<std::size_t>(i1) * axis2.count + i2]; }
    BellConfig config_at(double v1, double v2) const;
};

struct SweepOptions {
    Method method = Method::automatic;
    Observable observable = Observable::bell;
    /// 0 = available parallelism.
    int workers = 0;
    bool use_cache = true;
    /// Called with (done, total) from worker threads.
    std::function<void(long long, long long)> progress;
};

/// Memo of two-time correlators shared by the nodes of a sweep. Inputs are
/// snapped to a 2⁻⁴⁰ lattice before evaluation so that the stored value
/// depends on the key alone.
class CorrelatorCache {
public:
    CorrelatorCache();
    ~CorrelatorCache();
    CorrelatorCache(const CorrelatorCache&) = delete;
    CorrelatorCache& operator=(const CorrelatorCache&) = delete;

    CorrelatorResult get(const TransitionSpec& t, const EvaluationSettings& s, Method m);
    std::size_t size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Fills g.results, g.max_B and g.argmax. Failed nodes become NaN with a
/// diagnostic instead of aborting the sweep. Throws std::invalid_argument
/// on bad axes.
void sweep_map(SweepGrid& g, const EvaluationSettings& s, const SweepOptions& opt = {});

struct MaxResult {
    double value = 0;
    std::pair<double, double> location{0, 0};
    double grid_value = 0;
};

/// Coordinate descent from the best grid local maxima with the step halved
/// each iteration, kept inside the axis bounds. Never returns less than
/// the grid maximum.
MaxResult find_max(const SweepGrid& g, const EvaluationSettings& s, int refine_iters = 30,
                   const SweepOptions& opt = {});

int default_workers();

}  // namespace squeezebell
