#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "squeezebell/bell_scan.hpp"
#include "squeezebell/errors.hpp"
#include "squeezebell/evaluators.hpp"

namespace squeezebell::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
};

// Order here is the order of --dump-config.
const FlagSpec kFlags[] = {
    {"--r", "r", "squeezing amplitude at all four times"},
    {"--phi", "phi", "squeezing angle at all four times"},
    {"--ra", "r_a", "squeezing amplitude at t_a"},
    {"--phia", "phi_a", "squeezing angle at t_a"},
    {"--thetaa", "theta_a", "rotation angle at t_a"},
    {"--rb", "r_b", "squeezing amplitude at t_b"},
    {"--phib", "phi_b", "squeezing angle at t_b"},
    {"--thetab", "theta_b", "rotation angle at t_b"},
    {"--rap", "r_ap", "squeezing amplitude at t_a'"},
    {"--phiap", "phi_ap", "squeezing angle at t_a'"},
    {"--thetaap", "theta_ap", "rotation angle at t_a'"},
    {"--rbp", "r_bp", "squeezing amplitude at t_b'"},
    {"--phibp", "phi_bp", "squeezing angle at t_b'"},
    {"--thetabp", "theta_bp", "rotation angle at t_b'"},
    {"--dtheta", "dtheta", "theta_a - theta_b (correlator and map)"},
    {"--ell", "ell", "pseudo-spin bin width"},
    {"--method", "method", "auto|numeric|small-ell|large-ell|large-squeeze|equal-time|oracle"},
    {"--trunc-tol", "trunc_tol", "relative truncation tolerance"},
    {"--quad-tol", "quad_tol", "relative quadrature tolerance"},
    {"--max-bands", "max_bands", "largest number of bands per correlator"},
    {"--axis1", "axis1", "first sweep axis name:lo:hi:n"},
    {"--axis2", "axis2", "second sweep axis name:lo:hi:n"},
    {"--refine-iters", "refine_iters", "step halvings of the max refinement (0 disables)"},
    {"--workers", "workers", "worker threads (default SQUEEZEBELL_WORKERS or all cores)"},
    {"--format", "format", "csv|json"},
    {"--out", "out", "output path (default stdout)"},
};

const std::set<std::string> kCommands = {"correlator", "map", "bell", "bell-scan"};

std::set<std::string> allowed_keys(const std::string& command) {
    std::set<std::string> k = {"ell", "method", "trunc_tol", "quad_tol", "max_bands", "format", "out", "deg",
                               "r", "phi", "r_a", "phi_a", "theta_a", "r_b", "phi_b", "theta_b"};
    if (command == "correlator" || command == "map") k.insert("dtheta");
    if (command == "map" || command == "bell-scan") {
        k.insert({"axis1", "axis2", "workers"});
    }
    if (command == "bell-scan") k.insert("refine_iters");
    if (command == "bell" || command == "bell-scan" || command == "map") {
        k.insert({"r_ap", "phi_ap", "theta_ap", "r_bp", "phi_bp", "theta_bp"});
    }
    return k;
}

bool is_angle_key(const std::string& key) {
    return key == "phi" || key == "dtheta" || key.rfind("phi_", 0) == 0 || key.rfind("theta_", 0) == 0;
}

bool is_angle_axis(const std::string& name) {
    return name.rfind("phi_", 0) == 0 || name.rfind("theta_", 0) == 0 || name.rfind("dtheta_", 0) == 0;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

class Params {
public:
    Params(const RunConfig& c) : c_(c), deg_(flag("deg")) {}  // NOLINT

    bool has(const std::string& k) const { return c_.params.count(k) > 0; }

    bool flag(const std::string& k) const {
        const auto it = c_.params.find(k);
        if (it == c_.params.end()) return false;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw UsageError(k + ": expected true or false, got '" + it->second + "'");
    }

    double real(const std::string& k, double def) const {
        const auto it = c_.params.find(k);
        if (it == c_.params.end()) return def;
        double v = 0;
        try {
            v = parse_real(it->second);
        } catch (const std::invalid_argument&) {
            throw UsageError(k + ": not a number: '" + it->second + "'");
        }
        if (!std::isfinite(v)) throw UsageError(k + ": must be finite");
        return deg_ && is_angle_key(k) ? v * std::numbers::pi / 180.0 : v;
    }

    int integer(const std::string& k, int def) const {
        const auto it = c_.params.find(k);
        if (it == c_.params.end()) return def;
        try {
            std::size_t used = 0;
            const int v = std::stoi(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw UsageError(k + ": not an integer: '" + it->second + "'");
        }
    }

    std::string text(const std::string& k, const std::string& def) const {
        const auto it = c_.params.find(k);
        return it == c_.params.end() ? def : it->second;
    }

    bool degrees() const { return deg_; }

private:
    const RunConfig& c_;
    bool deg_;
};

SqueezeParams side_params(const Params& p, const std::string& suffix) {
    SqueezeParams s;
    s.r = p.real("r_" + suffix, p.real("r", 0.0));
    s.varphi = p.real("phi_" + suffix, p.real("phi", 0.0));
    s.theta = p.real("theta_" + suffix, 0.0);
    if (s.r < 0) throw UsageError("r_" + suffix + ": must be >= 0");
    return s;
}

EvaluationSettings settings_from(const Params& p) {
    EvaluationSettings s;
    s.ell = p.real("ell", s.ell);
    s.trunc_rel_tol = p.real("trunc_tol", s.trunc_rel_tol);
    s.quad_rel_tol = p.real("quad_tol", s.quad_rel_tol);
    s.max_bands = p.integer("max_bands", s.max_bands);
    if (!(s.ell > 0)) throw UsageError("ell: must be > 0");
    if (!(s.trunc_rel_tol > 0 && s.trunc_rel_tol < 1)) throw UsageError("trunc_tol: must lie in (0, 1)");
    if (!(s.quad_rel_tol > 0 && s.quad_rel_tol < 1)) throw UsageError("quad_tol: must lie in (0, 1)");
    if (s.max_bands < 1) throw UsageError("max_bands: must be >= 1");
    return s;
}

Method method_from(const Params& p) {
    try {
        return parse_method(p.text("method", "auto"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("method: ") + e.what());
    }
}

int workers_from(const Params& p) {
    int def = default_workers();
    if (const char* env = std::getenv("SQUEEZEBELL_WORKERS"); env && *env) {
        try {
            def = std::stoi(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("SQUEEZEBELL_WORKERS: not an integer: '") + env + "'");
        }
    }
    const int w = p.integer("workers", def);
    if (w < 1) throw UsageError("workers: must be >= 1");
    return w;
}

Axis axis_from(const Params& p, const std::string& key) {
    if (!p.has(key)) throw UsageError(key + ": required for this command (name:lo:hi:n)");
    Axis a;
    try {
        a = parse_axis(p.text(key, ""));
    } catch (const std::invalid_argument& e) {
        throw UsageError(key + ": " + e.what());
    }
    if (p.degrees() && is_angle_axis(a.name)) {
        a.lo *= std::numbers::pi / 180.0;
        a.hi *= std::numbers::pi / 180.0;
    }
    return a;
}

BellConfig bell_config(const Params& p, bool need_thetas) {
    if (need_thetas) {
        for (const char* k : {"theta_a", "theta_b", "theta_ap", "theta_bp"}) {
            if (!p.has(k)) throw UsageError(std::string(k) + ": all four rotation angles are required");
        }
    }
    BellConfig c;
    c.a = side_params(p, "a");
    c.b = side_params(p, "b");
    c.a_prime = side_params(p, "ap");
    c.b_prime = side_params(p, "bp");
    return c;
}

std::string correlator_flags(const CorrelatorResult& r) {
    std::string f;
    auto add = [&](const char* s) {
        if (!f.empty()) f += '|';
        f += s;
    };
    if (r.degenerate_path) add("degenerate");
    if (r.dtheta_nudge != 0) add("nudged");
    if (r.weak_convergence_only) add("weak");
    return f;
}

nlohmann::json to_json(const CorrelatorResult& r) {
    return {{"value", r.value},
            {"method", std::string(method_name(r.method))},
            {"n_bands_used", r.n_bands_used},
            {"series_terms_used", r.series_terms_used},
            {"quadrature_error_estimate", r.quadrature_error_estimate},
            {"degenerate_path", r.degenerate_path},
            {"dtheta_nudge", r.dtheta_nudge},
            {"weak_convergence_only", r.weak_convergence_only}};
}

std::string run_correlator(const Params& p, bool json, std::ostream& err) {
    TransitionSpec t{side_params(p, "a"), side_params(p, "b")};
    if (p.has("dtheta")) {
        if (p.has("theta_a")) throw UsageError("dtheta: give either dtheta or theta_a, not both");
        t.a.theta = t.b.theta + p.real("dtheta", 0.0);
    }
    const EvaluationSettings s = settings_from(p);
    const CorrelatorResult r = correlator(t, s, method_from(p));
    err << "method=" << method_name(r.method) << " bands=" << r.n_bands_used << " terms=" << r.series_terms_used
        << " quad_err=" << fmt(r.quadrature_error_estimate);
    if (const auto f = correlator_flags(r); !f.empty()) err << " flags=" << f;
    if (r.dtheta_nudge != 0) err << " dtheta_nudge=" << fmt(r.dtheta_nudge);
    err << '\n';
    if (json) return to_json(r).dump(2) + "\n";
    return fmt(r.value) + "\n";
}

std::string run_bell(const Params& p, bool json) {
    BellConfig c = bell_config(p, true);
    const EvaluationSettings s = settings_from(p);
    c.ell = s.ell;
    const BellResult b = bell_terms(c, s, method_from(p));
    const char* names[4] = {"E_ab", "E_abp", "E_apb", "E_apbp"};
    if (json) {
        nlohmann::json j;
        j["B"] = b.value;
        for (int i = 0; i < 4; ++i) j[names[i]] = to_json(b.terms[i]);
        j["violation"] = b.value > 2.0;
        return j.dump(2) + "\n";
    }
    std::string out = "# quantity,value,method,flags\n";
    for (int i = 0; i < 4; ++i) {
        out += std::string(names[i]) + "," + fmt(b.terms[i].value) + "," +
               std::string(method_name(b.terms[i].method)) + "," + correlator_flags(b.terms[i]) + "\n";
    }
    out += "B," + fmt(b.value) + ",," + std::string(b.value > 2.0 ? "violation" : "") + "\n";
    return out;
}

std::string run_sweep(const Params& p, bool json, bool bell, std::ostream& err) {
    SweepGrid g;
    g.axis1 = axis_from(p, "axis1");
    g.axis2 = axis_from(p, "axis2");
    g.fixed = bell_config(p, bell);
    if (!bell && p.has("dtheta")) {
        if (p.has("theta_a")) throw UsageError("dtheta: give either dtheta or theta_a, not both");
        g.fixed.a.theta = g.fixed.b.theta + p.real("dtheta", 0.0);
    }
    const EvaluationSettings s = settings_from(p);
    g.fixed.ell = s.ell;
    SweepOptions opt;
    opt.method = method_from(p);
    opt.observable = bell ? Observable::bell : Observable::correlator;
    opt.workers = workers_from(p);
    const int refine = bell ? p.integer("refine_iters", 30) : 0;
    if (refine < 0) throw UsageError("refine_iters: must be >= 0");
    try {
        sweep_map(g, s, opt);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::optional<MaxResult> refined;
    if (refine > 0) refined = find_max(g, s, refine, opt);

    long long failed = 0;
    for (const auto& node : g.results) {
        if (std::isnan(node.value)) {
            if (failed < 5) err << "node error: " << node.error << '\n';
            ++failed;
        }
    }
    if (failed > 0) err << failed << " of " << g.results.size() << " nodes failed\n";
    err << "max " << (bell ? "B" : "E") << " = " << fmt(g.max_B) << " at (" << fmt(g.argmax.first) << ", "
        << fmt(g.argmax.second) << ")\n";
    if (refined) {
        err << "refined max = " << fmt(refined->value) << " at (" << fmt(refined->location.first) << ", "
            << fmt(refined->location.second) << ")\n";
    }

    if (json) {
        nlohmann::json j;
        auto axis_json = [](const Axis& a) {
            return nlohmann::json{{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}};
        };
        j["observable"] = bell ? "B" : "E";
        j["axis1"] = axis_json(g.axis1);
        j["axis2"] = axis_json(g.axis2);
        nlohmann::json values = nlohmann::json::array(), methods = nlohmann::json::array(),
                       flags = nlohmann::json::array();
        for (int i1 = 0; i1 < g.axis1.count; ++i1) {
            nlohmann::json vr = nlohmann::json::array(), mr = nlohmann::json::array(), fr = nlohmann::json::array();
            for (int i2 = 0; i2 < g.axis2.count; ++i2) {
                const auto& node = g.at(i1, i2);
                vr.push_back(std::isnan(node.value) ? nlohmann::json(nullptr) : nlohmann::json(node.value));
                mr.push_back(node.method);
                fr.push_back(node.flags);
            }
            values.push_back(vr);
            methods.push_back(mr);
            flags.push_back(fr);
        }
        j["values"] = values;
        j["methods"] = methods;
        j["flags"] = flags;
        j["max"] = std::isnan(g.max_B) ? nlohmann::json(nullptr) : nlohmann::json(g.max_B);
        j["argmax"] = {g.argmax.first, g.argmax.second};
        if (refined) {
            j["refined_max"] = refined->value;
            j["refined_argmax"] = {refined->location.first, refined->location.second};
        }
        return j.dump(2) + "\n";
    }
    std::string out = "# axis1,axis2,value,method,flags\n";
    for (int i1 = 0; i1 < g.axis1.count; ++i1) {
        for (int i2 = 0; i2 < g.axis2.count; ++i2) {
            const auto& node = g.at(i1, i2);
            out += fmt(g.axis1.value(i1)) + "," + fmt(g.axis2.value(i2)) + "," + fmt(node.value) + "," +
                   node.method + "," + node.flags + "\n";
        }
    }
    out += "# max," + fmt(g.max_B) + "," + fmt(g.argmax.first) + "," + fmt(g.argmax.second) + "\n";
    if (refined) {
        out += "# refined_max," + fmt(refined->value) + "," + fmt(refined->location.first) + "," +
               fmt(refined->location.second) + "\n";
    }
    return out;
}

std::string execute(const RunConfig& cfg, std::ostream& err) {
    const auto allowed = allowed_keys(cfg.command);
    for (const auto& [k, v] : cfg.params) {
        if (!allowed.count(k)) throw UsageError(k + ": not used by command '" + cfg.command + "'");
    }
    const Params p(cfg);
    const std::string format = p.text("format", "csv");
    if (format != "csv" && format != "json") throw UsageError("format: expected csv or json, got '" + format + "'");
    const bool json = format == "json";
    if (cfg.command == "correlator") return run_correlator(p, json, err);
    if (cfg.command == "bell") return run_bell(p, json);
    if (cfg.command == "map") return run_sweep(p, json, false, err);
    return run_sweep(p, json, true, err);
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : kFlags) k.emplace_back(f.key);
        k.emplace_back("deg");
        return k;
    }();
    return keys;
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig c;
    const auto& keys = known_keys();
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
        if (key == "command") {
            if (!kCommands.count(value)) {
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown command '" +
                                            value + "'");
            }
            c.command = value;
            continue;
        }
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        }
        c.params[key] = value;
    }
    return c;
}

std::string dump_config(const RunConfig& c) {
    std::string out = "# squeezebell run configuration\n";
    if (!c.command.empty()) out += "command = " + c.command + "\n";
    for (const auto& k : known_keys()) {
        const auto it = c.params.find(k);
        if (it != c.params.end()) out += k + " = " + it->second + "\n";
    }
    return out;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-time pseudo-spin correlators and temporal Bell scans for two-mode squeezed states",
                 argv.empty() ? "squeezebell" : argv[0]};
    app.require_subcommand(0, 1);
    for (const auto& name : kCommands) {
        app.add_subcommand(name, name == "correlator" ? "evaluate one two-time correlator E(a,b)"
                                 : name == "bell"     ? "evaluate the Bell operator B"
                                 : name == "map"      ? "2D map of E(a,b)"
                                                      : "2D map of B with refinement of the maximum")
            ->fallthrough();
    }
    std::map<std::string, std::string> given;
    for (const auto& f : kFlags) {
        app.add_option_function<std::string>(
            f.flag, [&given, key = std::string(f.key)](const std::string& v) { given[key] = v; }, f.help);
    }
    bool deg = false, dump = false;
    std::string config_path;
    app.add_flag("--deg", deg, "angles are given in degrees");
    app.add_flag("--dump-config", dump, "print the effective configuration and exit");
    app.add_option("--config", config_path, "key = value configuration file");

    std::vector<const char*> cargv;
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("config: cannot open '" + config_path + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            try {
                cfg = parse_config_text(buf.str());
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
        for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
        for (const auto& [k, v] : given) cfg.params[k] = v;
        if (deg) cfg.params["deg"] = "true";
        if (cfg.command.empty()) throw UsageError("no command given (correlator, map, bell, bell-scan)");

        if (dump) {
            out << dump_config(cfg);
            return 0;
        }
        const std::string result = execute(cfg, err);
        const auto it = cfg.params.find("out");
        if (it != cfg.params.end()) {
            std::ofstream f(it->second, std::ios::binary);
            if (!f) throw UsageError("out: cannot write '" + it->second + "'");
            f << result;
        } else {
            out << result;
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int run(const std::vector<std::string>& argv) { return run(argv, std::cout, std::cerr); }

}  // namespace squeezebell::cli
