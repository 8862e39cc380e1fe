#include "squeezebell/bell_scan.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "squeezebell/errors.hpp"

namespace squeezebell {

namespace {

constexpr int kSnapBits = 40;

const char* const kSides[] = {"a", "b", "ap", "bp"};
const char* const kDiffs[] = {"dtheta_ab", "dtheta_apb", "dtheta_abp", "dtheta_apbp"};

SqueezeParams& side(BellConfig& c, std::string_view s) {
    if (s == "a") return c.a;
    if (s == "b") return c.b;
    if (s == "ap") return c.a_prime;
    return c.b_prime;
}

// Absolute quantity an axis writes to; two axes may not share one.
std::string target_of(std::string_view name) {
    if (name == "dtheta_ab") return "theta_a";
    if (name == "dtheta_apb") return "theta_ap";
    if (name == "dtheta_abp" || name == "dtheta_apbp") return "theta_bp";
    return std::string(name);
}

int order_of(std::string_view name) {
    for (int i = 0; i < 4; ++i) {
        if (name == kDiffs[i]) return 1 + i;
    }
    return 0;
}

long long snap_key(double x) { return std::llround(std::ldexp(x, kSnapBits)); }
double from_key(long long k) { return std::ldexp(static_cast<double>(k), -kSnapBits); }

struct Key {
    std::array<long long, 6> v;
    int method;
    bool operator==(const Key& o) const { return v == o.v && method == o.method; }
};

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = static_cast<std::size_t>(k.method);
        for (long long x : k.v) h = h * 1000003u ^ std::hash<long long>{}(x);
        return h;
    }
};

template <class Eval>
BellResult combine(const BellConfig& c, Eval&& eval) {
    const std::array<std::pair<BellTerm, TransitionSpec>, 4> specs = {{
        {BellTerm::ab, c.ab()},
        {BellTerm::abp, c.abp()},
        {BellTerm::apb, c.apb()},
        {BellTerm::apbp, c.apbp()},
    }};
    BellResult out;
    for (const auto& [term, spec] : specs) {
        try {
            out.terms[static_cast<int>(term)] = eval(spec);
        } catch (const DomainError& e) {
            throw DomainError(std::string(term_name(term)) + ": " + e.what());
        }
    }
    out.value = out.terms[0].value + out.terms[1].value + out.terms[2].value - out.terms[3].value;
    return out;
}

void describe(NodeResult& node, const CorrelatorResult* terms, int n) {
    std::string method(method_name(terms[0].method));
    bool degenerate = false, nudged = false, weak = false;
    for (int i = 0; i < n; ++i) {
        if (method_name(terms[i].method) != method) method = "mixed";
        degenerate = degenerate || terms[i].degenerate_path;
        nudged = nudged || terms[i].dtheta_nudge != 0;
        weak = weak || terms[i].weak_convergence_only;
    }
    node.method = method;
    std::string flags;
    auto add = [&](const char* f) {
        if (!flags.empty()) flags += '|';
        flags += f;
    };
    if (degenerate) add("degenerate");
    if (nudged) add("nudged");
    if (weak) add("weak");
    node.flags = flags;
}

void validate_axes(const Axis& a1, const Axis& a2) {
    for (const Axis* a : {&a1, &a2}) {
        if (!is_valid_axis_name(a->name)) throw std::invalid_argument("unknown axis parameter '" + a->name + "'");
        if (a->count < 2) throw std::invalid_argument("axis '" + a->name + "' needs at least 2 points");
        if (!std::isfinite(a->lo) || !std::isfinite(a->hi)) {
            throw std::invalid_argument("axis '" + a->name + "' bounds must be finite");
        }
    }
    if (target_of(a1.name) == target_of(a2.name)) {
        throw std::invalid_argument("axes '" + a1.name + "' and '" + a2.name + "' set the same parameter");
    }
}

void run_parallel(long long total, int workers, const std::function<void(long long)>& body) {
    const int n = std::max(1, std::min<int>(workers > 0 ? workers : default_workers(),
                                            static_cast<int>(std::min<long long>(total, 1 << 20))));
    if (n == 1) {
        for (long long i = 0; i < total; ++i) body(i);
        return;
    }
    std::atomic<long long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (long long i = next++; i < total; i = next++) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

double BellConfig::chasles_residual() const {
    return ab().delta_theta() - apb().delta_theta() + apbp().delta_theta() - abp().delta_theta();
}

std::string_view term_name(BellTerm t) {
    switch (t) {
        case BellTerm::ab: return "E(a,b)";
        case BellTerm::abp: return "E(a,b')";
        case BellTerm::apb: return "E(a',b)";
        case BellTerm::apbp: return "E(a',b')";
    }
    return "?";
}

BellResult bell_terms(const BellConfig& c, const EvaluationSettings& s, Method m) {
    EvaluationSettings local = s;
    local.ell = c.ell;
    return combine(c, [&](const TransitionSpec& t) { return correlator(t, local, m); });
}

double bell_operator(const BellConfig& c, const EvaluationSettings& s, Method m) {
    return bell_terms(c, s, m).value;
}

double Axis::value(int i) const {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    // Endpoint-exact and symmetric: lo(1 − t) + hi·t hits 0 exactly on
    // symmetric ranges with an odd count.
    return lo * (1.0 - t) + hi * t;
}

bool is_valid_axis_name(std::string_view name) {
    if (name == "ell") return true;
    for (const char* d : kDiffs) {
        if (name == d) return true;
    }
    for (const char* p : {"r_", "phi_", "theta_"}) {
        const std::string_view prefix(p);
        if (name.substr(0, prefix.size()) != prefix) continue;
        const auto rest = name.substr(prefix.size());
        for (const char* s : kSides) {
            if (rest == s) return true;
        }
    }
    return false;
}

double parse_real(std::string_view text) {
    const std::string t(text);
    auto plain = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("not a number: '" + t + "'");
        }
        if (used != s.size()) throw std::invalid_argument("not a number: '" + t + "'");
        return v;
    };
    const auto pos = t.find("pi");
    if (pos == std::string::npos) return plain(t);
    const std::string head = t.substr(0, pos), tail = t.substr(pos + 2);
    double factor = 1.0;
    if (head == "-") factor = -1.0;
    else if (head == "+" || head.empty()) factor = 1.0;
    else factor = plain(head.back() == '*' ? head.substr(0, head.size() - 1) : head);
    double v = factor * std::numbers::pi;
    if (!tail.empty()) {
        if (tail[0] != '/') throw std::invalid_argument("not a number: '" + t + "'");
        v /= plain(tail.substr(1));
    }
    return v;
}

Axis parse_axis(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = spec.find(':', start);
        parts.push_back(spec.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 4) throw std::invalid_argument("axis '" + std::string(spec) + "': expected name:lo:hi:n");
    Axis a;
    a.name = std::string(parts[0]);
    if (!is_valid_axis_name(a.name)) throw std::invalid_argument("unknown axis parameter '" + a.name + "'");
    auto num = [&](std::string_view s, const char* what) {
        try {
            return parse_real(s);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("axis '" + a.name + "': bad " + what + " '" + std::string(s) + "'");
        }
    };
    a.lo = num(parts[1], "lower bound");
    a.hi = num(parts[2], "upper bound");
    int n = 0;
    const auto res = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), n);
    if (res.ec != std::errc() || res.ptr != parts[3].data() + parts[3].size()) {
        throw std::invalid_argument("axis '" + a.name + "': bad point count '" + std::string(parts[3]) + "'");
    }
    if (n < 2) throw std::invalid_argument("axis '" + a.name + "' needs at least 2 points");
    a.count = n;
    return a;
}

BellConfig apply_axes(const BellConfig& base, const std::vector<std::pair<std::string, double>>& values) {
    std::vector<std::pair<std::string, double>> sorted = values;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& x, const auto& y) { return order_of(x.first) < order_of(y.first); });
    BellConfig c = base;
    for (const auto& [name, v] : sorted) {
        if (name == "ell") {
            c.ell = v;
        } else if (name == "dtheta_ab") {
            c.a.theta = c.b.theta + v;
        } else if (name == "dtheta_apb") {
            c.a_prime.theta = c.b.theta + v;
        } else if (name == "dtheta_abp") {
            c.b_prime.theta = c.a.theta - v;
        } else if (name == "dtheta_apbp") {
            c.b_prime.theta = c.a_prime.theta - v;
        } else {
            const auto us = name.find('_');
            if (us == std::string::npos || !is_valid_axis_name(name)) {
                throw std::invalid_argument("unknown axis parameter '" + name + "'");
            }
            const std::string_view kind(name.data(), us);
            SqueezeParams& p = side(c, std::string_view(name).substr(us + 1));
            if (kind == "r") p.r = v;
            else if (kind == "phi") p.varphi = v;
            else p.theta = v;
        }
    }
    return c;
}

BellConfig SweepGrid::config_at(double v1, double v2) const {
    return apply_axes(fixed, {{axis1.name, v1}, {axis2.name, v2}});
}

struct CorrelatorCache::Impl {
    mutable std::mutex mu;
    std::unordered_map<Key, CorrelatorResult, KeyHash> map;
};

CorrelatorCache::CorrelatorCache() : impl_(std::make_unique<Impl>()) {}
CorrelatorCache::~CorrelatorCache() = default;

std::size_t CorrelatorCache::size() const {
    std::lock_guard lock(impl_->mu);
    return impl_->map.size();
}

CorrelatorResult CorrelatorCache::get(const TransitionSpec& t, const EvaluationSettings& s, Method m) {
    const Key key{{snap_key(t.a.r), snap_key(t.a.varphi), snap_key(t.b.r), snap_key(t.b.varphi),
                   snap_key(t.delta_theta()), snap_key(s.ell)},
                  static_cast<int>(m)};
    {
        std::lock_guard lock(impl_->mu);
        const auto it = impl_->map.find(key);
        if (it != impl_->map.end()) return it->second;
    }
    TransitionSpec snapped;
    snapped.a = {from_key(key.v[0]), from_key(key.v[1]), from_key(key.v[4])};
    snapped.b = {from_key(key.v[2]), from_key(key.v[3]), 0.0};
    EvaluationSettings local = s;
    local.ell = from_key(key.v[5]);
    const CorrelatorResult r = correlator(snapped, local, m);
    std::lock_guard lock(impl_->mu);
    impl_->map.emplace(key, r);
    return r;
}

namespace {

NodeResult evaluate_node(const BellConfig& c, const EvaluationSettings& s, const SweepOptions& opt,
                         CorrelatorCache* cache) {
    NodeResult node;
    EvaluationSettings local = s;
    local.ell = c.ell;
    auto eval = [&](const TransitionSpec& t) {
        return cache ? cache->get(t, local, opt.method) : correlator(t, local, opt.method);
    };
    try {
        if (opt.observable == Observable::correlator) {
            const CorrelatorResult r = eval(c.ab());
            node.value = r.value;
            describe(node, &r, 1);
        } else {
            const BellResult b = combine(c, eval);
            node.value = b.value;
            describe(node, b.terms.data(), 4);
        }
    } catch (const std::exception& e) {
        node.value = std::numeric_limits<double>::quiet_NaN();
        node.method = std::string(method_name(opt.method));
        node.flags = "error";
        node.error = e.what();
    }
    return node;
}

}  // namespace

void sweep_map(SweepGrid& g, const EvaluationSettings& s, const SweepOptions& opt) {
    validate_axes(g.axis1, g.axis2);
    const long long n1 = g.axis1.count, n2 = g.axis2.count;
    const long long total = n1 * n2;
    g.results.assign(static_cast<std::size_t>(total), NodeResult{});
    CorrelatorCache cache;
    std::atomic<long long> done{0};
    run_parallel(total, opt.workers, [&](long long idx) {
        const int i1 = static_cast<int>(idx / n2), i2 = static_cast<int>(idx % n2);
        const BellConfig c = g.config_at(g.axis1.value(i1), g.axis2.value(i2));
        g.results[static_cast<std::size_t>(idx)] = evaluate_node(c, s, opt, opt.use_cache ? &cache : nullptr);
        const long long d = ++done;
        if (opt.progress) opt.progress(d, total);
    });
    g.max_B = std::numeric_limits<double>::quiet_NaN();
    for (long long idx = 0; idx < total; ++idx) {
        const double v = g.results[static_cast<std::size_t>(idx)].value;
        if (std::isnan(v)) continue;
        if (std::isnan(g.max_B) || v > g.max_B) {
            g.max_B = v;
            g.argmax = {g.axis1.value(static_cast<int>(idx / n2)), g.axis2.value(static_cast<int>(idx % n2))};
        }
    }
}

MaxResult find_max(const SweepGrid& g, const EvaluationSettings& s, int refine_iters, const SweepOptions& opt) {
    validate_axes(g.axis1, g.axis2);
    const int n1 = g.axis1.count, n2 = g.axis2.count;
    if (g.results.size() != static_cast<std::size_t>(n1) * n2) {
        throw std::invalid_argument("find_max: grid results are not filled");
    }
    MaxResult out;
    out.grid_value = g.max_B;
    out.value = g.max_B;
    out.location = g.argmax;
    if (std::isnan(g.max_B)) return out;

    // Local maxima of the grid, best first.
    struct Start {
        double v;
        int i1, i2;
    };
    std::vector<Start> starts;
    for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
            const double v = g.at(i1, i2).value;
            if (std::isnan(v)) continue;
            bool peak = true;
            for (int d1 = -1; d1 <= 1 && peak; ++d1) {
                for (int d2 = -1; d2 <= 1; ++d2) {
                    const int j1 = i1 + d1, j2 = i2 + d2;
                    if ((d1 == 0 && d2 == 0) || j1 < 0 || j2 < 0 || j1 >= n1 || j2 >= n2) continue;
                    const double w = g.at(j1, j2).value;
                    if (!std::isnan(w) && w > v) {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak) starts.push_back({v, i1, i2});
        }
    }
    std::stable_sort(starts.begin(), starts.end(), [](const Start& x, const Start& y) { return x.v > y.v; });
    constexpr std::size_t kStarts = 8;
    if (starts.size() > kStarts) starts.resize(kStarts);

    CorrelatorCache cache;
    auto f = [&](double v1, double v2) {
        const NodeResult r = evaluate_node(g.config_at(v1, v2), s, opt, opt.use_cache ? &cache : nullptr);
        return r.value;
    };
    const double lo1 = std::min(g.axis1.lo, g.axis1.hi), hi1 = std::max(g.axis1.lo, g.axis1.hi);
    const double lo2 = std::min(g.axis2.lo, g.axis2.hi), hi2 = std::max(g.axis2.lo, g.axis2.hi);
    const double step1_0 = (hi1 - lo1) / (n1 - 1), step2_0 = (hi2 - lo2) / (n2 - 1);

    std::vector<MaxResult> refined(starts.size());
    run_parallel(static_cast<long long>(starts.size()), opt.workers, [&](long long k) {
        const Start& st = starts[static_cast<std::size_t>(k)];
        double x1 = g.axis1.value(st.i1), x2 = g.axis2.value(st.i2), best = st.v;
        double h1 = step1_0, h2 = step2_0;
        for (int it = 0; it < refine_iters; ++it) {
            for (int moves = 0; moves < 100; ++moves) {
                double bx1 = x1, bx2 = x2, bv = best;
                for (int d1 = -1; d1 <= 1; ++d1) {
                    for (int d2 = -1; d2 <= 1; ++d2) {
                        if (d1 == 0 && d2 == 0) continue;
                        const double y1 = std::clamp(x1 + d1 * h1, lo1, hi1);
                        const double y2 = std::clamp(x2 + d2 * h2, lo2, hi2);
                        const double v = f(y1, y2);
                        if (!std::isnan(v) && v > bv) {
                            bv = v;
                            bx1 = y1;
                            bx2 = y2;
                        }
                    }
                }
                if (!(bv > best)) break;
                best = bv;
                x1 = bx1;
                x2 = bx2;
            }
            h1 *= 0.5;
            h2 *= 0.5;
        }
        refined[static_cast<std::size_t>(k)] = {best, {x1, x2}, g.max_B};
    });
    for (const auto& r : refined) {
        if (r.value > out.value) {
            out.value = r.value;
            out.location = r.location;
        }
    }
    return out;
}

int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace squeezebell
