#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oscint/errors.hpp"
#include "oscint/experiments.hpp"
#include "oscint/parallel.hpp"
#include "oscint/piece.hpp"
#include "oscint/quadrature.hpp"
#include "oscint/serialize.hpp"
#include "oscint/version.hpp"

namespace oscint {

namespace clidetail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s + ",") {
        if (c == ',' || c == ';' || c == ' ') {
            if (!cur.empty()) {
                try {
                    out.push_back(std::stoi(cur));
                } catch (const std::exception&) {
                    throw UsageError("bad integer list: " + s);
                }
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw UsageError("bad integer list: " + s);
    return out;
}

/// All tunables of every subcommand; each subcommand instance gets its own
/// copy so defaults can differ.
struct Opts {
    std::string input;
    std::string output;
    std::string format = "json";
    std::string config_path;
    int gamma = 8;
    double tol = 1e-6;
    std::vector<double> xi;
    int grid_k = 0;
    std::uint64_t seed = 1;
    int draws = 50;
    int threads = 0;
    bool drop_linear = false;
    std::int64_t l_lo = 4;
    std::int64_t l_hi = 16;
    int d = 2;
    std::vector<std::string> sets{"2,3", "2,8", "2,20", "2,50"};
    std::vector<int> n_values{3, 6, 12, 24};
    std::vector<int> d_values{1, 2, 3, 4};
    int max_exp = 16;
    double decades = 12.0;
    int instances = 1000;
    std::vector<int> gammas{1, 2, 4};
};

/// Config file fills in whatever the command line does not mention; flags
/// win because they are applied later by the parser.
inline void apply_config(Opts& o, const nlohmann::json& c) {
    if (!c.is_object()) throw UsageError("config file must hold a JSON object");
    auto take = [&](const char* key, auto& slot) {
        if (c.contains(key)) c.at(key).get_to(slot);
    };
    take("input", o.input);
    take("output", o.output);
    take("format", o.format);
    take("tol", o.tol);
    take("grid-k", o.grid_k);
    take("seed", o.seed);
    take("draws", o.draws);
    take("threads", o.threads);
    take("drop-linear", o.drop_linear);
    take("l-lo", o.l_lo);
    take("l-hi", o.l_hi);
    take("d", o.d);
    take("n", o.n_values);
    take("d-values", o.d_values);
    take("max-exp", o.max_exp);
    take("decades", o.decades);
    take("instances", o.instances);
    if (c.contains("xi")) {
        if (c.at("xi").is_array())
            c.at("xi").get_to(o.xi);
        else
            o.xi = {c.at("xi").get<double>()};
    }
    if (c.contains("gamma")) {
        if (c.at("gamma").is_array())
            c.at("gamma").get_to(o.gammas);
        else
            o.gamma = c.at("gamma").get<int>();
    }
    if (c.contains("set")) {
        o.sets.clear();
        for (const auto& e : c.at("set")) {
            if (e.is_string()) {
                o.sets.push_back(e.get<std::string>());
            } else {
                std::string s;
                for (const auto& v : e) {
                    if (!s.empty()) s += ',';
                    s += std::to_string(v.get<int>());
                }
                o.sets.push_back(s);
            }
        }
    }
}

inline Fewnomial load_fewnomial(const Opts& o, std::ostream& err) {
    if (o.input.empty()) throw UsageError("--input is required (inline JSON or a path)");
    std::size_t at = o.input.find_first_not_of(" \t\r\n");
    std::string text =
        (at != std::string::npos && o.input[at] == '{') ? o.input : read_file(o.input);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad input JSON: ") + e.what());
    }
    std::vector<double> coeffs;
    std::vector<int> exps;
    try {
        j.at("coeffs").get_to(coeffs);
        j.at("exponents").get_to(exps);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("input needs coeffs/exponents arrays: ") + e.what());
    }
    if (coeffs.size() != exps.size()) throw UsageError("coeffs and exponents differ in length");
    if (o.drop_linear) {
        std::vector<double> fc;
        std::vector<int> fe;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (exps[i] == 1) {
                err << "warning: dropping linear term (coefficient " << coeffs[i]
                    << "); it only shifts the frequency variable\n";
                continue;
            }
            fc.push_back(coeffs[i]);
            fe.push_back(exps[i]);
        }
        if (fe.empty() && !exps.empty())
            err << "warning: phase is empty after dropping the linear term\n";
        coeffs = std::move(fc);
        exps = std::move(fe);
    }
    return make_fewnomial(std::move(coeffs), std::move(exps));
}

struct Emitter {
    const Opts& o;
    std::ostream& out;
    nlohmann::json meta;

    std::ostream& sink(std::ofstream& file) const {
        if (o.output.empty()) return out;
        file.open(o.output);
        if (!file) throw UsageError("cannot open output file: " + o.output);
        return file;
    }

    void write_json(nlohmann::json payload) const {
        payload["meta"] = meta;
        std::ofstream file;
        sink(file) << payload.dump(2) << "\n";
    }

    void write_records(const SweepResult& r) const {
        if (o.format == "csv") {
            std::ofstream file;
            std::ostream& s = sink(file);
            s << "# version=" << meta.at("version").get<std::string>()
              << " config_hash=" << meta.at("config_hash").get<std::string>()
              << " seed=" << meta.at("seed").get<std::uint64_t>() << "\n";
            s << kSweepCsvHeader << "\n";
            for (const SweepRecord& rec : r.records) s << csv_row(rec) << "\n";
        } else {
            write_json(nlohmann::json{{"records", r.records}, {"summary", r.summary}});
        }
    }
};

inline std::vector<std::vector<int>> parse_sets(const std::vector<std::string>& sets) {
    std::vector<std::vector<int>> out;
    out.reserve(sets.size());
    for (const std::string& s : sets) out.push_back(split_ints(s));
    return out;
}

inline int cmd_decompose(const Opts& o, const Emitter& em, std::ostream& err) {
    Fewnomial q = load_fewnomial(o, err);
    ScaleFrame f = scale_frame(q);
    BadSets bs = all_bad_sets(f, o.gamma);
    IntegerInterval window = working_window(q, o.tol);
    auto comps = good_components(f, o.gamma, window, true);
    nlohmann::json j = bs;
    j["q"] = q;
    j["window"] = window;
    j["components"] = comps;
    em.write_json(std::move(j));
    return 0;
}

inline int cmd_multiplier(const Opts& o, const Emitter& em, std::ostream& err) {
    Fewnomial q = load_fewnomial(o, err);
    std::vector<double> xis = o.xi.empty() ? std::vector<double>{0.0} : o.xi;
    auto samples = parallel_map(xis, [&](double x) { return pv_multiplier_sample(q, x, o.tol); },
                                o.threads);
    bool any = false;
    for (const auto& s : samples) any = any || s.certified;
    em.write_json(nlohmann::json{{"q", q}, {"samples", samples}});
    if (!any) {
        err << "error: no sample certified at tol=" << o.tol << "\n";
        return 1;
    }
    return 0;
}

inline int cmd_sup(const Opts& o, const Emitter& em, std::ostream& err) {
    Fewnomial q = load_fewnomial(o, err);
    GridSpec spec{o.grid_k, true};
    SupResult r = multiplier_sup(q, spec, o.tol, o.threads);
    nlohmann::json j = r;
    j["q"] = q;
    j["samples"] = r.samples;
    em.write_json(std::move(j));
    if (r.certified_fraction == 0.0) {
        err << "error: no grid point certified at tol=" << o.tol << "\n";
        return 1;
    }
    return 0;
}

inline int cmd_decay(const Opts& o, const Emitter& em, std::ostream& err) {
    Fewnomial q = load_fewnomial(o, err);
    ScaleFrame f = scale_frame(q);
    IntegerInterval window = working_window(q, o.tol);
    auto comps = good_components(f, o.gamma, window, true);
    if (comps.empty()) throw Error("no good components inside the working window");
    const GoodComponent* pick = &comps.front();
    for (const auto& c : comps)
        if (c.hi - c.lo > pick->hi - pick->lo) pick = &c;
    DecayFit fit = decay_fit(q, *pick, o.xi, {o.l_lo, o.l_hi}, o.tol);
    em.write_json(nlohmann::json{{"q", q}, {"component", *pick}, {"fit", fit}});
    return 0;
}

inline int cmd_sweep(const Opts& o, const Emitter& em, std::ostream&) {
    GridSpec spec{o.grid_k, true};
    SweepResult r = uniformity_sweep(o.d, parse_sets(o.sets), o.draws, o.decades, spec, o.tol,
                                     o.seed, o.threads);
    em.write_records(r);
    bool any = false;
    for (const auto& rec : r.records) any = any || rec.certified_fraction == 1.0;
    return any ? 0 : 1;
}

inline int cmd_parissis(const Opts& o, const Emitter& em, std::ostream&) {
    SweepResult r = parissis_growth(o.n_values, o.draws, o.tol, o.decades, o.seed, o.threads);
    em.write_records(r);
    bool any = false;
    for (const auto& rec : r.records) any = any || rec.certified_fraction == 1.0;
    return any ? 0 : 1;
}

inline int cmd_logd(const Opts& o, const Emitter& em, std::ostream&) {
    GridSpec spec{o.grid_k, true};
    SweepResult r = logd_scan(o.d_values, o.max_exp, o.draws, spec, o.tol, o.decades, o.seed,
                              o.threads);
    em.write_records(r);
    bool any = false;
    for (const auto& rec : r.records) any = any || rec.certified_fraction == 1.0;
    return any ? 0 : 1;
}

inline int cmd_check(const Opts& o, const Emitter& em, std::ostream& err) {
    PropertyReport rep = structure_suite(o.instances, o.seed, o.gammas, o.threads);
    em.write_json(nlohmann::json(rep));
    if (!rep.pass()) {
        err << "error: structural property failures (see report)\n";
        return 1;
    }
    return 0;
}

inline nlohmann::json effective_config(const std::string& name, const Opts& o) {
    nlohmann::json c{{"subcommand", name}, {"format", o.format}, {"seed", o.seed},
                     {"tol", o.tol},       {"threads", o.threads}};
    if (name == "decompose" || name == "decay") c["gamma"] = o.gamma;
    if (name == "decompose" || name == "multiplier" || name == "sup" || name == "decay") {
        c["input"] = o.input;
        c["drop-linear"] = o.drop_linear;
    }
    if (name == "multiplier" || name == "decay") c["xi"] = o.xi;
    if (name == "sup" || name == "sweep" || name == "logd") c["grid-k"] = o.grid_k;
    if (name == "decay") {
        c["l-lo"] = o.l_lo;
        c["l-hi"] = o.l_hi;
    }
    if (name == "sweep") {
        c["d"] = o.d;
        c["set"] = o.sets;
    }
    if (name == "sweep" || name == "parissis" || name == "logd") {
        c["draws"] = o.draws;
        c["decades"] = o.decades;
    }
    if (name == "parissis") c["n"] = o.n_values;
    if (name == "logd") {
        c["d-values"] = o.d_values;
        c["max-exp"] = o.max_exp;
    }
    if (name == "check") {
        c["instances"] = o.instances;
        c["gamma"] = o.gammas;
    }
    return c;
}

}

/// Entry point behind main(); data goes to `out` (or --output), diagnostics
/// to `err`. Returns 0 on success, 1 on computation failure, 2 on usage.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using clidetail::Opts;

    // first pass: locate --config so its values can seed the defaults
    nlohmann::json config = nlohmann::json::object();
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size())
                path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0)
                path = args[i].substr(9);
            if (!path.empty())
                config = nlohmann::json::parse(clidetail::read_file(path));
        }
    } catch (const clidetail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: bad config JSON: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"oscillatory principal-value multiplier toolkit"};
    app.require_subcommand(1);

    struct Sub {
        std::string name;
        std::string blurb;
        Opts o;
        int (*fn)(const Opts&, const clidetail::Emitter&, std::ostream&);
    };
    std::vector<Sub> subs;
    subs.push_back({"decompose", "bad scales and good components of a phase", Opts{},
                    clidetail::cmd_decompose});
    subs.push_back({"multiplier", "evaluate m(xi) with a certified error bound", Opts{},
                    clidetail::cmd_multiplier});
    subs.push_back({"sup", "certified sup of |m| over a frequency grid", Opts{},
                    clidetail::cmd_sup});
    subs.push_back({"decay", "fit the geometric decay of windowed pieces", Opts{},
                    clidetail::cmd_decay});
    subs.push_back({"sweep", "random-coefficient sup sweep across exponent sets", Opts{},
                    clidetail::cmd_sweep});
    subs.push_back({"parissis", "sup growth of full polynomials at xi = 0", Opts{},
                    clidetail::cmd_parissis});
    subs.push_back({"logd", "exploratory sup scan grouped by monomial count", Opts{},
                    clidetail::cmd_logd});
    subs.push_back({"check", "randomized property battery over the decomposition", Opts{},
                    clidetail::cmd_check});
    subs[4].o.draws = 50;
    subs[4].o.decades = 12.0;
    subs[5].o.draws = 100;
    subs[5].o.decades = 2.0;
    subs[6].o.draws = 100;
    subs[6].o.decades = 2.0;

    try {
        for (Sub& s : subs) clidetail::apply_config(s.o, config);
    } catch (const clidetail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: bad config JSON: " << e.what() << "\n";
        return 2;
    }

    for (Sub& s : subs) {
        CLI::App* c = app.add_subcommand(s.name, s.blurb);
        Opts& o = s.o;
        c->add_option("--config", o.config_path, "JSON config file mirroring these flags");
        c->add_option("--output", o.output, "write the data stream to this file");
        c->add_option("--format", o.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--tol", o.tol, "absolute error budget");
        c->add_option("--seed", o.seed, "master seed");
        c->add_option("--threads", o.threads, "worker threads (0 = auto, OSCINT_THREADS)");
        if (s.name == "decompose" || s.name == "multiplier" || s.name == "sup" ||
            s.name == "decay") {
            c->add_option("--input", o.input, "fewnomial as inline JSON or a path");
            c->add_flag("--drop-linear", o.drop_linear,
                        "strip an exponent-1 term before validation");
        }
        if (s.name == "decompose" || s.name == "decay")
            c->add_option("--gamma", o.gamma, "dyadic comparability slack");
        if (s.name == "multiplier" || s.name == "decay")
            c->add_option("--xi", o.xi, "frequency value(s)");
        if (s.name == "sup" || s.name == "sweep" || s.name == "logd")
            c->add_option("--grid-k", o.grid_k, "quarter-octaves per side (0 = auto)");
        if (s.name == "decay") {
            c->add_option("--l-lo", o.l_lo, "first piece offset");
            c->add_option("--l-hi", o.l_hi, "last piece offset");
        }
        if (s.name == "sweep") {
            c->add_option("--d", o.d, "monomial count");
            c->add_option("--set", o.sets, "exponent set, e.g. 2,8 (repeatable)");
        }
        if (s.name == "sweep" || s.name == "parissis" || s.name == "logd") {
            c->add_option("--draws", o.draws, "draws per group");
            c->add_option("--decades", o.decades, "coefficient magnitude spread");
        }
        if (s.name == "parissis") c->add_option("--n", o.n_values, "polynomial degrees");
        if (s.name == "logd") {
            c->add_option("--d", o.d_values, "monomial counts");
            c->add_option("--max-exp", o.max_exp, "exponent pool upper end");
        }
        if (s.name == "check") {
            c->add_option("--instances", o.instances, "random instances");
            c->add_option("--gamma", o.gammas, "slack values (repeatable)");
        }
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Sub* active = nullptr;
    for (const Sub& s : subs)
        if (app.get_subcommand(s.name)->parsed()) active = &s;
    if (active == nullptr) {
        err << "error: a subcommand is required\n";
        return 2;
    }

    const Opts& o = active->o;
    if (o.format == "csv" && active->name != "sweep" && active->name != "parissis" &&
        active->name != "logd") {
        err << "error: csv output is only defined for sweep, parissis and logd records\n";
        return 2;
    }

    nlohmann::json eff = clidetail::effective_config(active->name, o);
    nlohmann::json meta = metadata_json(fnv1a64(eff.dump()), o.seed);
    meta["config"] = eff;

    try {
        clidetail::Emitter em{o, out, std::move(meta)};
        return active->fn(o, em, err);
    } catch (const clidetail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ToleranceNotMet& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NonIncreasingExponents& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ZeroCoefficient& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const LinearTermPresent& e) {
        err << "error: " << e.what()
            << " (pass --drop-linear to absorb it into the frequency)\n";
        return 2;
    } catch (const DegeneratePhase& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidDimensions& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}
