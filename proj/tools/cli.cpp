#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "ffspec/format.hpp"
#include "ffspec/observables.hpp"
#include "ffspec/orthopoly.hpp"
#include "ffspec/specfun.hpp"

namespace ffspec::cli {

using nlohmann::json;

namespace {

const char* growth_key(Growth g) { return growth_name(g); }

Growth growth_from(const std::string& s) {
    if (s == "grow_l") return Growth::GrowL;
    if (s == "grow_k") return Growth::GrowK;
    throw ConfigError("growth must be 'grow_l' or 'grow_k' (got '" + s + "')");
}

Kind kind_from(const std::string& s) {
    if (s == "plain") return Kind::Plain;
    if (s == "negativity") return Kind::Negativity;
    throw ConfigError("kind must be 'plain' or 'negativity' (got '" + s + "')");
}

Geometry geometry_from(const json& g) {
    if (!g.is_array() || g.size() != 3) throw ConfigError("geometry entries must be [k, l, n]");
    Geometry geo{g[0].get<int>(), g[1].get<int>(), g[2].get<int>()};
    geo.validate();
    return geo;
}

std::vector<int> int_range(const json& r, const char* name) {
    if (!r.is_array() || r.size() < 2 || r.size() > 3)
        throw ConfigError(std::string("geometry_range.") + name + " must be [from, to] or [from, to, step]");
    int a = r[0].get<int>(), b = r[1].get<int>(), s = r.size() == 3 ? r[2].get<int>() : 1;
    if (s <= 0) throw ConfigError(std::string("geometry_range.") + name + ": step must be positive");
    if (b < a) throw ConfigError(std::string("geometry_range.") + name + ": empty range");
    std::vector<int> v;
    for (int x = a; x <= b; x += s) v.push_back(x);
    return v;
}

std::vector<double> linspace(const json& r, const char* name) {
    if (!r.is_array() || r.size() != 3) throw ConfigError(std::string("lambda_grid.") + name + " must be [from, to, count]");
    double a = r[0].get<double>(), b = r[1].get<double>();
    int n = r[2].get<int>();
    if (n < 1) throw ConfigError(std::string("lambda_grid.") + name + ": count must be >= 1");
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json normalized_symbol(const json& s) {
    if (!s.is_object() || !s.contains("type")) throw ConfigError("symbol must be an object with a 'type' field");
    std::string type = s.at("type").get<std::string>();
    json out = s;
    if (type == "step") {
        if (!out.contains("p_F")) out["p_F"] = pi / 2;
    } else if (type == "constant") {
        if (!out.contains("value")) throw ConfigError("constant symbol needs 'value'");
    } else if (type == "reservoir") {
        ReservoirSpec def;
        if (!out.contains("grid")) out["grid"] = 64;
        if (!out.contains("hopping_scale")) out["hopping_scale"] = def.hopping_scale;
        if (!out.contains("coupling")) out["coupling"] = def.coupling;
        if (!out.contains("band_bottom")) out["band_bottom"] = def.band_bottom;
        if (!out.contains("level_spacing")) out["level_spacing"] = def.level_spacing;
        if (!out.contains("couplings")) out["couplings"] = def.couplings;
        if (!out.contains("fermi_energy")) out["fermi_energy"] = def.fermi_energy;
    } else if (type == "sampled") {
        if (!out.contains("samples") || !out.contains("p_F")) throw ConfigError("sampled symbol needs 'p_F' and 'samples'");
    } else if (type == "sampled_file") {
        if (!out.contains("path")) throw ConfigError("sampled_file symbol needs 'path'");
        std::string body = read_file(out.at("path").get<std::string>());
        std::ostringstream h;
        h << std::hex << std::setw(16) << std::setfill('0') << fnv1a(body);
        out["content_hash"] = h.str();
    } else {
        throw ConfigError("unknown symbol type '" + type + "'");
    }
    return out;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream o(p, std::ios::binary | std::ios::trunc);
    if (!o) throw ConfigError("cannot write '" + p.string() + "'");
    o << body;
}

std::filesystem::path out_path(const ScenarioConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

std::string short_g(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", x);
    return b;
}

std::string short_c(cplx z) { return short_g(z.real()) + (z.imag() < 0 ? "" : "+") + short_g(z.imag()) + "i"; }

std::string tag(const Geometry& g) { return std::to_string(g.k) + "_" + std::to_string(g.l) + "_" + std::to_string(g.n); }

void require_geometries(const ScenarioConfig& cfg, const char* cmd) {
    if (cfg.geometries.empty())
        throw ConfigError(std::string(cmd) + ": no geometry given (set 'geometries', 'geometry_range' or --geometry)");
}

// Runs body(i) for i < n on `jobs` threads; the first exception is rethrown in order.
template <class F>
void sweep(int n, int jobs, F body) {
    std::vector<std::exception_ptr> errs(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<Geometry> parse_geometry_list(const std::string& s) {
    std::vector<Geometry> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) {
        Geometry g;
        char c1 = 0, c2 = 0;
        std::istringstream is(item);
        if (!(is >> g.k >> c1 >> g.l >> c2 >> g.n) || c1 != ',' || c2 != ',' || !is.eof())
            throw ConfigError("--geometry: expected k,l,n[:k,l,n...] (got '" + item + "')");
        g.validate();
        out.push_back(g);
    }
    if (out.empty()) throw ConfigError("--geometry: empty list");
    return out;
}

cplx parse_lambda(const std::string& s) {
    double re = 0, im = 0;
    char c = 0;
    std::istringstream is(s);
    if (!(is >> re >> c >> im) || c != ',' || !is.eof()) throw ConfigError("--lambda: expected RE,IM (got '" + s + "')");
    return {re, im};
}

ScenarioConfig parse_config(const json& j) {
    if (!j.is_null() && !j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known{"symbol", "geometries", "geometry_range", "kind", "growth", "lambdas",
                                                "lambda_grid", "out", "jobs", "phase_variant", "verify", "p_grid"};
    ScenarioConfig cfg;
    try {
        if (j.is_object())
            for (auto it = j.begin(); it != j.end(); ++it)
                if (std::find(known.begin(), known.end(), it.key()) == known.end())
                    throw ConfigError("unknown config field '" + it.key() + "'");
        json jj = j.is_null() ? json::object() : j;
        cfg.symbol = normalized_symbol(jj.value("symbol", json{{"type", "step"}}));
        if (jj.contains("geometries") && jj.contains("geometry_range"))
            throw ConfigError("give either 'geometries' or 'geometry_range', not both");
        if (jj.contains("geometries")) {
            if (!jj["geometries"].is_array() || jj["geometries"].empty()) throw ConfigError("'geometries' must be a nonempty list");
            for (const auto& g : jj["geometries"]) cfg.geometries.push_back(geometry_from(g));
        }
        if (jj.contains("geometry_range")) {
            const auto& r = jj["geometry_range"];
            for (int k : int_range(r.at("k"), "k"))
                for (int l : int_range(r.at("l"), "l"))
                    for (int n : int_range(r.at("n"), "n")) {
                        Geometry g{k, l, n};
                        g.validate();
                        cfg.geometries.push_back(g);
                    }
        }
        cfg.kind = kind_from(jj.value("kind", "plain"));
        cfg.growth = growth_from(jj.value("growth", "grow_l"));
        if (jj.contains("lambdas") && jj.contains("lambda_grid")) throw ConfigError("give either 'lambdas' or 'lambda_grid', not both");
        if (jj.contains("lambdas")) {
            cfg.lambdas.clear();
            for (const auto& l : jj["lambdas"]) {
                if (!l.is_array() || l.size() != 2) throw ConfigError("'lambdas' entries must be [re, im]");
                cfg.lambdas.emplace_back(l[0].get<double>(), l[1].get<double>());
            }
            if (cfg.lambdas.empty()) throw ConfigError("'lambdas' must be nonempty");
        }
        if (jj.contains("lambda_grid")) {
            cfg.lambdas.clear();
            const auto& g = jj["lambda_grid"];
            for (double re : linspace(g.at("re"), "re"))
                for (double im : linspace(g.at("im"), "im")) cfg.lambdas.emplace_back(re, im);
        }
        cfg.out_dir = jj.value("out", std::string("out"));
        cfg.jobs = jj.value("jobs", 0);
        if (cfg.jobs < 0) throw ConfigError("'jobs' must be >= 0");
        cfg.variant = phase_variant_from_name(jj.value("phase_variant", std::string("printed_r11")));
        if (jj.contains("verify")) {
            const auto& v = jj["verify"];
            cfg.verify.identities = v.value("identities", true);
            cfg.verify.special_functions = v.value("special_functions", true);
            cfg.verify.szego = v.value("szego", true);
            cfg.verify.matching = v.value("matching", true);
            cfg.verify.headline = v.value("headline", true);
            cfg.verify.phase_switch = v.value("phase_switch", true);
        }
        cfg.p_grid = jj.value("p_grid", 257);
        if (cfg.p_grid < 2) throw ConfigError("'p_grid' must be >= 2");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    json geos = json::array();
    for (const auto& g : cfg.geometries) geos.push_back({g.k, g.l, g.n});
    json lams = json::array();
    for (const auto& l : cfg.lambdas) lams.push_back({l.real(), l.imag()});
    cfg.canonical = {{"symbol", cfg.symbol},
                     {"geometries", geos},
                     {"kind", kind_name(cfg.kind)},
                     {"growth", growth_key(cfg.growth)},
                     {"lambdas", lams},
                     {"phase_variant", phase_variant_name(cfg.variant)},
                     {"p_grid", cfg.p_grid},
                     {"verify",
                      {{"identities", cfg.verify.identities},
                       {"special_functions", cfg.verify.special_functions},
                       {"szego", cfg.verify.szego},
                       {"matching", cfg.verify.matching},
                       {"headline", cfg.verify.headline},
                       {"phase_switch", cfg.verify.phase_switch}}}};
    return cfg;
}

ReservoirSpec default_reservoir() {
    ReservoirSpec s;
    s.coupling = 0.3;
    s.band_bottom = 1.6;
    s.level_spacing = 0.05;
    s.couplings.assign(8, 1.0);
    s.fermi_energy = 1.0;
    return s;
}

std::optional<ReservoirSpec> reservoir_of(const ScenarioConfig& cfg) {
    if (cfg.symbol.at("type") != "reservoir") return std::nullopt;
    try {
        ReservoirSpec s;
        s.hopping_scale = cfg.symbol.at("hopping_scale").get<double>();
        s.coupling = cfg.symbol.at("coupling").get<double>();
        s.band_bottom = cfg.symbol.at("band_bottom").get<double>();
        s.level_spacing = cfg.symbol.at("level_spacing").get<double>();
        s.couplings = cfg.symbol.at("couplings").get<std::vector<double>>();
        s.fermi_energy = cfg.symbol.at("fermi_energy").get<double>();
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed reservoir spec: ") + e.what());
    }
}

OccupationSymbol make_symbol(const ScenarioConfig& cfg) {
    const json& s = cfg.symbol;
    try {
        std::string type = s.at("type").get<std::string>();
        if (type == "step")
            return OccupationSymbol::from_step_values(s.at("p_F").get<double>(), s.value("f_in", 1.0), s.value("f_out", -1.0));
        if (type == "constant") return OccupationSymbol::constant(s.at("value").get<double>());
        if (type == "reservoir") return OccupationSymbol::from_occupation(*reservoir_of(cfg), s.at("grid").get<int>());
        if (type == "sampled") {
            json j = s;
            j["representation"] = "sampled";
            if (!j.contains("jump_values")) j["jump_values"] = {s.at("samples").at(0), s.value("f_out", -1.0)};
            return OccupationSymbol::from_json(j);
        }
        return OccupationSymbol::from_json(json::parse(read_file(s.at("path").get<std::string>())));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed symbol spec: ") + e.what());
    }
}

std::string provenance_line(const ScenarioConfig& cfg, const std::string& subcommand) {
    std::string body = cfg.canonical.dump();
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << fnv1a(body);
    json p = {{"config_hash", "fnv1a64:" + h.str()},
              {"config", cfg.canonical},
              {"subcommand", subcommand},
              {"modules", {{"ffspec", kVersion}}},
              {"sign_switches",
               {{"phase_variant", phase_variant_name(cfg.variant)},
                {"go_sign", "+"},
                {"grow_k_ratio", "D(k,l,n)/D(k-1,l,n)"}}}};
    return "# provenance: " + p.dump() + "\n";
}

bool CheckResult::pass() const {
    if (!applicable) return true;
    if (std::isnan(value)) return false;
    return at_least ? value >= threshold : value <= threshold;
}

// ---------------------------------------------------------------- commands

int cmd_spectrum(const ScenarioConfig& cfg, std::ostream& log) {
    require_geometries(cfg, "spectrum");
    auto sym = make_symbol(cfg);
    auto res = spectra(sym, cfg.geometries, cfg.kind, cfg.jobs);
    std::string prov = provenance_line(cfg, cfg.kind == Kind::Plain ? "spectrum" : "negativity");
    std::ostringstream summary;
    summary << prov << "k,l,n,kind,size,entropy,log_negativity\n";
    for (const auto& r : res) {
        std::string body = prov + spectrum_csv(r);
        if (r.kind == Kind::Plain)
            body += "# entropy," + fmt_g(r.entropy) + "\n";
        else
            body += "# log_negativity," + fmt_g(r.log_negativity) + "\n";
        auto p = out_path(cfg, std::string("spectrum_") + kind_name(r.kind) + "_" + tag(r.geo) + ".csv");
        write_file(p, body);
        summary << r.geo.k << "," << r.geo.l << "," << r.geo.n << "," << kind_name(r.kind) << "," << r.eigenvalues.size()
                << "," << (r.kind == Kind::Plain ? fmt_g(r.entropy) : "") << ","
                << (r.kind == Kind::Negativity ? fmt_g(r.log_negativity) : "") << "\n";
        log << "spectrum " << r.geo.str() << " " << kind_name(r.kind) << ": " << r.eigenvalues.size() << " eigenvalues -> "
            << p.string() << "\n";
    }
    write_file(out_path(cfg, std::string("spectrum_summary_") + kind_name(cfg.kind) + ".csv"), summary.str());
    return 0;
}

int cmd_compare(const ScenarioConfig& cfg, std::ostream& log) {
    require_geometries(cfg, "compare");
    auto sym = make_symbol(cfg);
    const int ng = static_cast<int>(cfg.geometries.size()), nl = static_cast<int>(cfg.lambdas.size());
    std::vector<cplx> exact(ng * nl), asym(ng * nl);
    sweep(ng * nl, cfg.jobs, [&](int i) {
        const Geometry& g = cfg.geometries[i / nl];
        cplx lam = cfg.lambdas[i % nl];
        exact[i] = det_ratio(sym, g, lam, cfg.kind, cfg.growth);
        asym[i] = det_ratio_asymptotic(sym, g, lam, cfg.kind, cfg.growth, cfg.variant);
    });
    auto err = [&](int i) { return std::abs(asym[i] - exact[i]) / std::abs(exact[i]); };

    std::string prov = provenance_line(cfg, "compare");
    std::ostringstream t;
    t << prov << "k,l,n,growth,re_lambda,im_lambda,exact_re,exact_im,asymptotic_re,asymptotic_im,rel_error\n";
    log << "geometry        lambda          exact                     asymptotic                rel_error\n";
    for (int i = 0; i < ng * nl; ++i) {
        const Geometry& g = cfg.geometries[i / nl];
        cplx lam = cfg.lambdas[i % nl];
        t << g.k << "," << g.l << "," << g.n << "," << growth_key(cfg.growth) << "," << fmt_g(lam.real()) << ","
          << fmt_g(lam.imag()) << "," << fmt_g(exact[i].real()) << "," << fmt_g(exact[i].imag()) << ","
          << fmt_g(asym[i].real()) << "," << fmt_g(asym[i].imag()) << "," << fmt_g(err(i)) << "\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-15s %-15s %-25s %-25s %.3e\n", g.str().c_str(),
                      short_c(lam).c_str(),
                      short_c(exact[i]).c_str(), short_c(asym[i]).c_str(), err(i));
        log << line;
    }
    write_file(out_path(cfg, "compare.csv"), t.str());

    std::ostringstream s;
    s << prov << "re_lambda,im_lambda,from,to,error_ratio,slope\n";
    for (int li = 0; li < nl; ++li) {
        for (int gi = 0; gi + 1 < ng; ++gi) {
            const Geometry &a = cfg.geometries[gi], &b = cfg.geometries[gi + 1];
            double ea = err(gi * nl + li), eb = err((gi + 1) * nl + li);
            double ratio = ea / eb;
            int sa = cfg.growth == Growth::GrowL ? a.l : a.k, sb = cfg.growth == Growth::GrowL ? b.l : b.k;
            double slope = sa != sb ? std::log(ratio) / std::log(double(sb) / sa) : std::nan("");
            s << fmt_g(cfg.lambdas[li].real()) << "," << fmt_g(cfg.lambdas[li].imag()) << ",\"" << a.str() << "\",\""
              << b.str() << "\"," << fmt_g(ratio) << "," << fmt_g(slope) << "\n";
            log << "convergence " << a.str() << " -> " << b.str() << ": error ratio " << short_g(ratio)
                << ", slope " << short_g(slope) << "\n";
        }
    }
    write_file(out_path(cfg, "compare_summary.csv"), s.str());

    // density moments and (plain) entropy change
    // the first moment vanishes for particle-hole symmetric symbols, so only q = 0, 2 are tabulated
    const int per = cfg.kind == Kind::Plain ? 3 : 2;
    std::vector<ObservableRow> rows(ng * per);
    sweep(ng, cfg.jobs, [&](int gi) {
        const Geometry& g = cfg.geometries[gi];
        if (g.k < 1 || g.l < 1) throw ConfigError("compare: k, l >= 1 required for the density comparison");
        for (int q : {0, 2}) {
            double a = density_moment(sym, g, cfg.kind, cfg.growth, q, cfg.variant).real();
            double x = exact_moment_change(sym, g, cfg.kind, cfg.growth, q).real();
            rows[gi * per + q / 2] = {"density_moment_" + std::to_string(q), g, cfg.kind, a, x};
        }
        if (cfg.kind == Kind::Plain)
            rows[gi * per + 2] = {"delta_entropy", g, cfg.kind, entropy_change(sym, g, cfg.kind, cfg.growth, cfg.variant).total(),
                                  exact_entropy_change(sym, g, cfg.growth)};
    });
    write_file(out_path(cfg, "observables.csv"), prov + observables_csv(rows));
    for (const auto& r : rows)
        log << r.quantity << " " << r.geo.str() << ": asymptotic " << short_g(r.asymptotic) << ", exact " << short_g(r.exact)
            << ", rel_error " << short_g(r.rel_error()) << "\n";
    return 0;
}

std::vector<CheckResult> verify_suite(const ScenarioConfig& cfg, const OccupationSymbol& sym) {
    std::vector<CheckResult> out;
    std::mt19937_64 gen(20240601);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };

    if (cfg.verify.identities) {
        double worst = 0.0;
        for (int k = 1; k <= 5; ++k)
            for (int l = 1; l <= 5; ++l) {
                Geometry g{k, l, k + 1 + (k + l) % 3};
                for (Kind kind : {Kind::Plain, Kind::Negativity})
                    for (cplx lam : {cplx(0, 2), cplx(0.3, 0.7)}) {
                        cplx d = char_poly(build_covariance(sym, g, kind), lam);
                        cplx dl = char_poly(build_covariance(sym, {k, l - 1, g.n}, kind), lam);
                        cplx dk = char_poly(build_covariance(sym, {k - 1, l, g.n}, kind), lam);
                        worst = std::max(worst, rel(det_ratio(sym, g, lam, kind, Growth::GrowL), d / dl));
                        worst = std::max(worst, rel(det_ratio(sym, g, lam, kind, Growth::GrowK), d / dk));
                    }
            }
        out.push_back({"dets_and_chis", worst, 1e-8});
        worst = 0.0;
        for (int k = 1; k <= 4; ++k)
            for (int l = 1; l <= 4; ++l)
                for (Kind kind : {Kind::Plain, Kind::Negativity})
                    worst = std::max(worst, t_matrix_check(sym, {k, l, k + 2 + (k * l) % 3}, cplx(0, 2), kind).max_residual());
        out.push_back({"ts_and_chis", worst, 1e-7});
        ReservoirSpec spec = reservoir_of(cfg).value_or(default_reservoir());
        worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            auto sol = dispersion_roots(spec, -pi + (i + 0.5) * 2 * pi / 64);
            double s = 0.0;
            for (double w : sol.weights) s += w;
            worst = std::max(worst, std::abs(s - 1.0));
        }
        out.push_back({"mode_weights_sum", worst, 1e-10});
    }

    if (cfg.verify.special_functions) {
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            cplx a(uni(-0.9, 1.9), uni(-0.7, 0.7));
            auto z = BranchedComplex::polar(uni(0.05, 25.0), uni(-pi, pi));
            cplx lhs = tricomi_u(a, z.rotated(-2 * pi));
            cplx ga = gamma_fn(a);
            cplx rhs = std::exp(2 * pi * I * a) * tricomi_u(a, z) -
                       2 * pi * I / (ga * ga) * std::exp(pi * I * a) * std::exp(z.value) * tricomi_u(1.0 - a, z.rotated(-pi));
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
        out.push_back({"psi_monodromy", worst, 1e-9});
        worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            auto z = BranchedComplex::polar(uni(0.05, 45.0), uni(-3.1, 3.1));
            worst = std::max(worst, rel(tricomi_u(1.0, z), std::exp(z.value) * incomplete_gamma0(z)));
        }
        out.push_back({"u_equals_exp_gamma0", worst, 1e-10});
        worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            cplx al(uni(-0.45, 0.45), uni(-0.4, 0.4));
            auto z = BranchedComplex::polar(uni(0.05, 20.0), uni(0.5 * pi, 1.5 * pi));
            QP a = pq_functions(t % 2, al, z), b = pq_functions(t % 2, al, z.rotated(-2 * pi));
            double scale = 1.0 + std::abs(a.q) + std::abs(a.p);
            worst = std::max(worst, std::abs(b.q - a.q) / scale);
            worst = std::max(worst, std::abs(b.p - (a.q * 2.0 * I * std::sin(pi * al) + a.p)) / scale);
        }
        out.push_back({"pq_monodromy", worst, 1e-9});
    }

    if (cfg.verify.szego) {
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            cplx lam(uni(-2, 2), uni(-2, 2));
            if (std::abs(lam.imag()) < 0.05) lam += cplx(0, 0.1);
            for (double s2 : {1.0, -1.0}) worst = std::max(worst, szego_check(sym, lam, s2).residual);
        }
        out.push_back({"szego", worst, 1e-8});
    }

    if (cfg.verify.matching) {
        CheckResult mo{"matching_mid_out_slope", 0.0, 1.9, true}, im{"matching_in_mid_slope", 0.0, 0.9, true};
        if (sym.has_jump()) {
            auto rep = matching_check(fh_data(sym, cplx(0, 2), Kind::Negativity));
            mo.value = rep.mid_out_slope;
            im.value = rep.in_mid_slope;
        } else {
            mo.applicable = im.applicable = false;
        }
        out.push_back(mo);
        out.push_back(im);
    }

    if (cfg.verify.headline) {
        double worst = 0.0, shrink = std::numeric_limits<double>::infinity();
        for (Kind kind : {Kind::Plain, Kind::Negativity})
            for (Growth w : {Growth::GrowL, Growth::GrowK}) {
                double e[2];
                int i = 0;
                for (Geometry g : {Geometry{16, 16, 128}, Geometry{32, 32, 256}})
                    e[i++] = rel(det_ratio_asymptotic(sym, g, cplx(0, 2), kind, w, cfg.variant), det_ratio(sym, g, cplx(0, 2), kind, w));
                worst = std::max(worst, e[0]);
                if (e[1] > 1e-13) shrink = std::min(shrink, e[0] / e[1]);
            }
        out.push_back({"go_rel_error_16_16_128", worst, 0.05});
        out.push_back({"go_error_shrink_on_doubling", shrink, 2.0, true});
    }

    if (cfg.verify.phase_switch)
        out.push_back({"phase_switch_matches_oracle", cfg.variant == oracle_preferred_variant() ? 0.0 : 1.0, 0.0});
    return out;
}

int cmd_verify(const ScenarioConfig& cfg, std::ostream& log) {
    auto sym = make_symbol(cfg);
    auto checks = verify_suite(cfg, sym);
    std::ostringstream t;
    t << provenance_line(cfg, "verify") << "check,value,threshold,comparison,status\n";
    bool ok = true;
    for (const auto& c : checks) {
        std::string status = !c.applicable ? "n/a" : c.pass() ? "pass" : "fail";
        ok = ok && c.pass();
        t << c.name << "," << fmt_g(c.value) << "," << fmt_g(c.threshold) << "," << (c.at_least ? ">=" : "<=") << ","
          << status << "\n";
        char line[200];
        std::snprintf(line, sizeof line, "%-4s %-30s %12.4e %s %.1e\n", status == "pass" ? "PASS" : status == "n/a" ? "N/A" : "FAIL",
                      c.name.c_str(), c.value, c.at_least ? ">=" : "<=", c.threshold);
        log << line;
    }
    write_file(out_path(cfg, "verify.csv"), t.str());
    log << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? 0 : 1;
}

int cmd_model_occupation(const ScenarioConfig& cfg, std::ostream& log) {
    auto spec = reservoir_of(cfg);
    if (!spec) throw ConfigError("model-occupation: symbol.type must be 'reservoir'");
    double p_F = fermi_momentum(*spec);
    const int n = cfg.p_grid;
    int marker = static_cast<int>(std::lround(p_F / pi * (n - 1)));
    std::ostringstream t;
    t << provenance_line(cfg, "model-occupation") << "# p_F," << fmt_g(p_F) << "\n";
    t << "p,occupation,weight_sum,fermi_marker\n";
    for (int j = 0; j < n; ++j) {
        double p = pi * j / (n - 1);
        auto sol = dispersion_roots(*spec, p);
        double s = 0.0;
        for (double w : sol.weights) s += w;
        t << fmt_g(p) << "," << fmt_g(occupation(*spec, p, FermiEdge::Below)) << "," << fmt_g(s) << ","
          << (j == marker ? 1 : 0) << "\n";
    }
    auto path = out_path(cfg, "occupation.csv");
    write_file(path, t.str());
    log << "model-occupation: p_F = " << fmt_g(p_F) << " -> " << path.string() << "\n";
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free-fermion entanglement spectra: exact and asymptotic"};
    app.require_subcommand(1);
    std::string config_path, out_dir, kind, variant;
    std::vector<std::string> lambdas, geometries;
    int jobs = -1;
    app.add_option("--config", config_path, "JSON scenario file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
    app.add_option("--lambda", lambdas, "spectral parameter RE,IM (repeatable)");
    app.add_option("--geometry", geometries, "k,l,n[:k,l,n...]");
    app.add_option("--kind", kind, "plain | negativity");
    app.add_option("--phase-variant", variant, "printed_r11 | printed_r22");
    std::vector<std::string> names{"spectrum", "negativity", "compare", "verify", "model-occupation"};
    for (const auto& n : names) app.add_subcommand(n)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        json j = json::object();
        if (!config_path.empty()) {
            try {
                j = json::parse(read_file(config_path));
            } catch (const json::parse_error& e) {
                throw ConfigError("config '" + config_path + "' is not valid JSON: " + e.what());
            }
        }
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (!out_dir.empty()) j["out"] = out_dir;
        if (jobs >= 0) j["jobs"] = jobs;
        if (!kind.empty()) j["kind"] = kind;
        if (!variant.empty()) j["phase_variant"] = variant;
        if (!lambdas.empty()) {
            j.erase("lambda_grid");
            j["lambdas"] = json::array();
            for (const auto& s : lambdas) {
                cplx l = parse_lambda(s);
                j["lambdas"].push_back({l.real(), l.imag()});
            }
        }
        if (!geometries.empty()) {
            j.erase("geometry_range");
            j["geometries"] = json::array();
            for (const auto& s : geometries)
                for (const auto& g : parse_geometry_list(s)) j["geometries"].push_back({g.k, g.l, g.n});
        }
        if (cmd == "negativity") j["kind"] = "negativity";
        ScenarioConfig cfg = parse_config(j);
        if (cmd == "spectrum" || cmd == "negativity") return cmd_spectrum(cfg, out);
        if (cmd == "compare") return cmd_compare(cfg, out);
        if (cmd == "verify") return cmd_verify(cfg, out);
        return cmd_model_occupation(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical failure in " << e.module() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace ffspec::cli
