#include "cli.hpp"

#include "coded_metric.hpp"
#include "continuum.hpp"
#include "csv.hpp"
#include "direct_graph.hpp"
#include "excursions.hpp"
#include "lifo.hpp"
#include "markov.hpp"
#include "parallel.hpp"
#include "scaling.hpp"
#include "stats.hpp"
#include "weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mgraph::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int schema_version = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by all subcommands; unset ones may come from --config.
struct Opts {
    std::string weights, limit, out, mode, config, family, edge_fn = "exp";
    std::uint64_t seed = 1;
    long long replicas = 1;
    double horizon = 0, dt = 0, eps = 1, rho = 2.5, q = 1, kappa = 1;
    std::size_t topk = 50;
    int epochs = 5;
    unsigned threads = 1;
    bool identities = false, metric = false, edge_law = false;
    std::vector<long long> ns{10000, 100000, 1000000};
};

// Inline JSON when the text starts like JSON, otherwise a file path.
json read_json(const std::string& src)
{
    auto first = src.find_first_not_of(" \t\n");
    if (first != std::string::npos && (src[first] == '{' || src[first] == '['))
        return json::parse(src);
    std::ifstream in(src);
    if (!in) throw UsageError("cannot read " + src);
    return json::parse(in);
}

WeightSeq load_weights(const Opts& o)
{
    if (o.weights.empty()) throw UsageError("--weights is required");
    return read_json(o.weights).get<WeightSeq>();
}

LimitParams load_limit(const Opts& o)
{
    if (o.limit.empty()) throw UsageError("--limit is required");
    auto p = read_json(o.limit).get<LimitParams>();
    p.validate();
    return p;
}

fs::path out_dir(const Opts& o)
{
    if (o.out.empty()) throw UsageError("--out is required");
    fs::create_directories(o.out);
    return fs::path(o.out);
}

void write_file(const fs::path& p, const std::string& s)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

template <class F>
void write_with(const fs::path& p, F&& fn)
{
    std::ostringstream os;
    fn(os);
    write_file(p, os.str());
}

json meta(const std::string& cmd, const Opts& o)
{
    return {{"schema", schema_version}, {"command", cmd}, {"seed", o.seed}, {"replicas", o.replicas}};
}

// Config keys fill flags that were not given on the command line.
void apply_config(CLI::App& sub, Opts& o)
{
    if (o.config.empty()) return;
    json c = read_json(o.config);
    if (!c.contains("schema") || c["schema"] != schema_version) throw UsageError("config: expected \"schema\": 1");
    auto as_src = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    static const std::set<std::string> keys{"weights", "limit", "seed", "replicas", "out", "mode", "horizon",
                                            "dt", "topk", "threads", "eps", "epochs", "ns", "family", "rho",
                                            "q", "kappa", "edge_fn"};
    for (auto& [k, v] : c.items()) {
        if (k == "schema") continue;
        if (!keys.count(k)) throw UsageError("config: unknown key " + k);
        std::string flag = "--" + k;
        std::replace(flag.begin(), flag.end(), '_', '-');
        // keys that the chosen subcommand does not take are ignored
        if (!sub.get_option_no_throw(flag) || sub.count(flag) > 0) continue;
        if (k == "weights") o.weights = as_src(v);
        else if (k == "limit") o.limit = as_src(v);
        else if (k == "seed") o.seed = v.get<std::uint64_t>();
        else if (k == "replicas") o.replicas = v.get<long long>();
        else if (k == "out") o.out = v.get<std::string>();
        else if (k == "mode") o.mode = v.get<std::string>();
        else if (k == "horizon") o.horizon = v.get<double>();
        else if (k == "dt") o.dt = v.get<double>();
        else if (k == "topk") o.topk = v.get<std::size_t>();
        else if (k == "threads") o.threads = v.get<unsigned>();
        else if (k == "eps") o.eps = v.get<double>();
        else if (k == "epochs") o.epochs = v.get<int>();
        else if (k == "ns") o.ns = v.get<std::vector<long long>>();
        else if (k == "family") o.family = v.get<std::string>();
        else if (k == "rho") o.rho = v.get<double>();
        else if (k == "q") o.q = v.get<double>();
        else if (k == "kappa") o.kappa = v.get<double>();
        else if (k == "edge_fn") o.edge_fn = v.get<std::string>();
    }
}

// ---- subcommands ----

int run_simulate(const Opts& o, std::ostream& out)
{
    auto dir = out_dir(o);
    WeightSeq w = load_weights(o);
    json m = meta("simulate", o);
    m["mode"] = o.mode;
    if (o.mode == "direct") {
        auto g = sample_direct(w, edge_fn_from_string(o.edge_fn), o.seed);
        auto comps = connected_components(g);
        write_with(dir / "edges.csv", [&](std::ostream& os) { write_edges_csv(os, g); });
        write_with(dir / "components.csv", [&](std::ostream& os) { write_components_csv(os, comps); });
        m["edge_fn"] = o.edge_fn;
        m["edges"] = g.edges.size();
    } else if (o.mode == "lifo") {
        auto tr = simulate_lifo(w, o.seed);
        auto ps = sample_pinches(tr, o.seed);
        AssemblyStats st;
        auto g = assemble_graph(tr, ps, &st);
        auto comps = connected_components(g);
        write_with(dir / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, tr); });
        write_with(dir / "pinches.csv", [&](std::ostream& os) { write_pinches_csv(os, ps); });
        write_with(dir / "edges.csv", [&](std::ostream& os) { write_edges_csv(os, g); });
        write_with(dir / "components.csv", [&](std::ostream& os) { write_components_csv(os, comps); });
        write_with(dir / "masses.csv", [&](std::ostream& os) { write_masses_csv(os, excursion_masses(tr.Y), o.topk); });
        m["tree_edges"] = st.tree_edges;
        m["pinch_edges"] = st.pinch_edges;
        m["self_loops"] = st.self_loops;
        m["duplicates"] = st.duplicates;
        m["pinch_area"] = ps.area;
    } else if (o.mode == "markov") {
        MarkovStop stop{o.horizon > 0 ? o.horizon : 100.0, o.epochs};
        auto tr = simulate_markov(w, stop, o.seed);
        auto c = color_blue_red(tr);
        auto rep = verify_embedding(tr, c);
        auto fs_ = gw_forest_stats(tr);
        write_with(dir / "markov_trace.csv", [&](std::ostream& os) { write_markov_trace_csv(os, tr); });
        json f = {{"V", fs_.V}, {"Hght", fs_.Hght}, {"contour", fs_.contour}, {"offspring_hist", fs_.offspring_hist},
                  {"tree_sizes", fs_.tree_sizes}};
        write_file(dir / "forest.json", f.dump(2) + "\n");
        write_file(dir / "identities.json", json(rep).dump(2) + "\n");
        m["end_time"] = tr.end_time;
        m["epochs"] = tr.epochs;
        m["blue_total"] = c.blue_total;
        m["red_total"] = c.red_total;
        if (c.t_star) m["t_star_surrogate"] = *c.t_star;
    } else {
        throw UsageError("--mode must be direct, lifo or markov");
    }
    write_file(dir / "meta.json", m.dump(2) + "\n");
    out << "wrote " << dir.string() << "\n";
    return 0;
}

int run_verify(const Opts& o, std::ostream& out)
{
    WeightSeq w = load_weights(o);
    bool do_id = o.identities || !o.metric, do_metric = o.metric || !o.identities;
    json rep = meta("verify", o);
    bool pass = true;
    const auto R = std::size_t(std::max(1LL, o.replicas));
    if (do_id) {
        MarkovStop stop{o.horizon > 0 ? o.horizon : 100.0, o.epochs};
        std::vector<IdentityReport> reps(R);
        parallel_for(R, o.threads, [&](std::size_t r) {
            Rng rng = make_rng(o.seed, stream::markov, r);
            auto tr = simulate_markov(w, stop, rng);
            reps[r] = verify_embedding(tr, color_blue_red(tr));
        });
        IdentityReport agg;
        json failed = json::array();
        for (std::size_t r = 0; r < R; ++r) {
            for (auto& [k, v] : reps[r].items) {
                auto& a = agg.items[k];
                a.pass = a.pass && v.pass;
                a.max_abs_err = std::max(a.max_abs_err, v.max_abs_err);
                a.n_points += v.n_points;
            }
            if (!reps[r].pass()) failed.push_back(r);
        }
        rep["identities"] = agg;
        rep["failed_replicas"] = failed;
        pass = pass && agg.pass();
    }
    if (do_metric) {
        std::vector<char> ok(R);
        std::vector<long long> pairs(R, 0);
        parallel_for(R, o.threads, [&](std::size_t r) {
            Rng rng = make_rng(o.seed, stream::lifo, r), prng = make_rng(o.seed, stream::pinch, r);
            auto tr = simulate_lifo(w, rng);
            auto mc = check_lifo_distances(tr, sample_pinches(tr, prng));
            ok[r] = mc.pass;
            pairs[r] = mc.pairs;
        });
        long long np = 0;
        bool all = true;
        for (std::size_t r = 0; r < R; ++r) {
            np += pairs[r];
            all = all && ok[r];
        }
        rep["coded_distances"] = {{"pass", all}, {"pairs", np}};
        pass = pass && all;
    }
    rep["pass"] = pass;
    std::string s = rep.dump(2) + "\n";
    if (!o.out.empty())
        write_file(out_dir(o) / "verify.json", s);
    out << s;
    return pass ? 0 : 1;
}

int run_scaling(const Opts& o, std::ostream& out)
{
    json rep = meta("scaling", o);
    if (!o.limit.empty()) {
        LimitParams p = load_limit(o);
        auto pr = psi_report(p);
        json j = {{"root", pr.root}, {"is_grey", pr.is_grey}, {"grey_integral_tail", pr.grey_integral_tail}};
        json psi_tab = json::array();
        for (double l : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) psi_tab.push_back({l, psi(p, l)});
        j["psi"] = psi_tab;
        if (pr.is_grey) {
            json prof = json::array();
            for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) prof.push_back({t, extinction_profile(p, t)});
            j["extinction_profile"] = prof;
        }
        auto al = aldous_limic_params(p);
        j["aldous_limic"] = {{"kappa", al.kappa_al}, {"tau", al.tau_al}};
        rep["psi"] = j;
    }
    std::string family = o.family.empty() && o.limit.empty() ? "powerlaw" : o.family;
    if (!family.empty()) {
        std::vector<ScalingTriple> fam;
        for (long long n : o.ns) {
            if (family == "powerlaw")
                fam.push_back(gen_powerlaw_triple(n, o.rho, o.q, o.kappa));
            else if (family == "er")
                fam.push_back(gen_er_triple(n, 1.0 / double(n)));
            else
                throw UsageError("--family must be powerlaw or er");
        }
        if (fam.empty()) throw UsageError("--ns is empty");
        LimitParams p;
        if (!o.limit.empty())
            p = load_limit(o);
        else if (fam.back().limit)
            p = *fam.back().limit;
        else {
            // critical Erdos-Renyi: Brownian motion with parabolic drift
            p.beta = 1;
            p.kappa = 1;
        }
        auto rr = check_regime(fam, p, {1, 10, 100});
        json rows = json::array();
        for (auto& r : rr.rows)
            rows.push_back({{"n", r.n}, {"a", r.a}, {"b", r.b}, {"b_over_a2", r.b_over_a2}, {"C1", r.C1}, {"C2", r.C2}});
        rep["regime"] = {{"family", family}, {"limit", p}, {"rows", rows}, {"apriori_ok", rr.apriori_ok},
                         {"C1_ok", rr.C1_ok}, {"C2_ok", rr.C2_ok}, {"C3_ok", rr.C3_ok},
                         {"beta0_positive", rr.beta0_positive}, {"C4_by_shortcut", rr.C4_by_shortcut},
                         {"notes", rr.notes}};
        if (!o.out.empty()) {
            auto dir = out_dir(o);
            write_with(dir / "regime.csv", [&](std::ostream& os) { write_regime_csv(os, rr); });
            write_with(dir / "c3.csv", [&](std::ostream& os) { write_c3_csv(os, rr); });
        }
    }
    std::string s = rep.dump(2) + "\n";
    if (!o.out.empty()) write_file(out_dir(o) / "scaling.json", s);
    out << s;
    return 0;
}

int run_metric(const Opts& o, std::ostream& out)
{
    WeightSeq w = load_weights(o);
    if (!o.mode.empty() && o.mode != "lifo") throw UsageError("metric: only --mode lifo is supported");
    auto tr = simulate_lifo(w, o.seed);
    auto ps = sample_pinches(tr, o.seed);
    auto dec = excursions_above_inf(tr.Y);
    auto loc = assign_pinches(dec, ps);
    auto mc = check_lifo_distances(tr, ps);
    json rep = meta("metric", o);
    rep["matches_bfs"] = mc.pass;
    rep["pairs"] = mc.pairs;
    rep["mismatches"] = mc.mismatches;
    rep["eps"] = o.eps;
    if (!dec.exc.empty()) {
        const auto& e = dec.exc[0];
        CodedSpace sp = lifo_coded_space(tr, e, loc[0], o.eps);
        rep["largest_excursion"] = {{"l", e.l}, {"r", e.r}, {"zeta", e.zeta}, {"pinches", sp.pinches.size()}};
        if (!o.out.empty()) {
            auto dir = out_dir(o);
            write_with(dir / "tree_matrix.csv", [&](std::ostream& os) { write_matrix_csv(os, sp.samples, tree_matrix(sp)); });
            write_with(dir / "pinched_matrix.csv", [&](std::ostream& os) { write_matrix_csv(os, sp.samples, pinched_matrix(sp)); });
        }
    }
    std::string s = rep.dump(2) + "\n";
    if (!o.out.empty()) write_file(out_dir(o) / "metric.json", s);
    out << s;
    return mc.pass ? 0 : 1;
}

int run_continuum(const Opts& o, std::ostream& out)
{
    LimitParams p = load_limit(o);
    double T = o.horizon > 0 ? o.horizon : 15.0;
    double dt = o.dt > 0 ? o.dt : 1e-4 * T;
    int J = choose_truncation(p, T, 1e-3);
    const auto R = std::size_t(std::max(1LL, o.replicas));
    std::vector<std::vector<double>> masses(R);
    std::vector<GridPath> first(1);
    parallel_for(R, o.threads, [&](std::size_t r) {
        Rng rng = make_rng(o.seed, stream::limit, r);
        GridPath g = simulate_limit_Y(p, dt, T, J, rng);
        g.seed = stream_seed(o.seed, stream::limit, r);
        masses[r] = limit_masses(g, o.topk);
        if (r == 0) first[0] = std::move(g);
    });
    json rep = meta("continuum", o);
    rep["T"] = T;
    rep["dt_requested"] = dt;
    rep["dt"] = first[0].dt;
    rep["J"] = J;
    rep["truncation_bound"] = first[0].truncation_bound;
    json z1 = json::array();
    for (auto& m : masses) z1.push_back(m.empty() ? 0.0 : m[0]);
    rep["largest_mass"] = z1;
    if (!o.out.empty()) {
        auto dir = out_dir(o);
        write_with(dir / "grid.csv", [&](std::ostream& os) { write_grid_csv(os, first[0]); });
        write_with(dir / "masses.csv", [&](std::ostream& os) {
            os << "replica,rank,zeta\n";
            for (std::size_t r = 0; r < R; ++r)
                for (std::size_t k = 0; k < masses[r].size(); ++k) os << r << ',' << k + 1 << ',' << num(masses[r][k]) << '\n';
        });
        write_file(dir / "continuum.json", rep.dump(2) + "\n");
        out << "wrote " << dir.string() << "\n";
    } else {
        out << rep.dump(2) << "\n";
    }
    return 0;
}

int run_compare(const Opts& o, std::ostream& out)
{
    if (!o.edge_law) throw UsageError("compare: choose a comparison (--edge-law)");
    WeightSeq w = load_weights(o);
    auto rep = edge_marginal_compare(w, o.replicas, o.seed, o.threads);
    json j = rep;
    j["schema"] = schema_version;
    std::ostringstream sum;
    write_summary(sum, rep);
    if (!o.out.empty()) {
        auto dir = out_dir(o);
        write_file(dir / "compare.json", j.dump(2) + "\n");
        write_file(dir / "summary.txt", sum.str());
    }
    out << sum.str();
    return rep.pass() ? 0 : 1;
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"w-multiplicative random graphs: queue encodings, coded metrics and limits", "mgraph"};
    app.require_subcommand(1);
    Opts o;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", o.config, "JSON config with \"schema\": 1; flags override it");
        s->add_option("--seed", o.seed, "master seed");
        s->add_option("--out", o.out, "output directory");
        s->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    };
    auto* sim = app.add_subcommand("simulate", "sample one graph and write its traces");
    common(sim);
    sim->add_option("--weights", o.weights, "weights JSON (file or inline)");
    sim->add_option("--mode", o.mode, "direct | lifo | markov");
    sim->add_option("--edge-fn", o.edge_fn, "exp | cap | ratio (direct mode)");
    sim->add_option("--horizon", o.horizon, "markov: time horizon");
    sim->add_option("--epochs", o.epochs, "markov: stop after this many empty-queue epochs");
    sim->add_option("--topk", o.topk, "number of masses written");

    auto* ver = app.add_subcommand("verify", "pathwise identities and coded distances over replicas");
    common(ver);
    ver->add_option("--weights", o.weights, "weights JSON (file or inline)");
    ver->add_option("--replicas", o.replicas, "replica count");
    ver->add_flag("--identities", o.identities, "blue/red embedding identities on Markov traces");
    ver->add_flag("--metric", o.metric, "coded distances against BFS on LIFO graphs");
    ver->add_option("--horizon", o.horizon, "markov: time horizon");
    ver->add_option("--epochs", o.epochs, "markov: empty-queue epochs");
    ver->add_option("--eps", o.eps, "shortcut length for pinched distances");

    auto* sc = app.add_subcommand("scaling", "scaling diagnostics and Laplace exponent report");
    common(sc);
    sc->add_option("--limit", o.limit, "limit parameters JSON {alpha,beta,kappa,c}");
    sc->add_option("--family", o.family, "powerlaw | er (default powerlaw unless --limit is given)");
    sc->add_option("--ns", o.ns, "indices n of the family");
    sc->add_option("--rho", o.rho, "power-law exponent");
    sc->add_option("--q", o.q, "power-law scale q");
    sc->add_option("--kappa", o.kappa, "power-law kappa");

    auto* me = app.add_subcommand("metric", "tree and pinched distance matrices of a LIFO graph");
    common(me);
    me->add_option("--weights", o.weights, "weights JSON (file or inline)");
    me->add_option("--mode", o.mode, "lifo");
    me->add_option("--eps", o.eps, "shortcut length");

    auto* co = app.add_subcommand("continuum", "grid simulation of the limit process and its excursion masses");
    common(co);
    co->add_option("--limit", o.limit, "limit parameters JSON {alpha,beta,kappa,c}");
    co->add_option("--horizon", o.horizon, "time horizon T (default 15)");
    co->add_option("--dt", o.dt, "grid step (default 1e-4 T, rounded down to T/2^m)");
    co->add_option("--replicas", o.replicas, "replica count");
    co->add_option("--topk", o.topk, "masses kept per replica");

    auto* cmp = app.add_subcommand("compare", "direct versus LIFO-assembled graph laws");
    common(cmp);
    cmp->add_option("--weights", o.weights, "weights JSON (file or inline)");
    cmp->add_option("--replicas", o.replicas, "replicas per construction");
    cmp->add_flag("--edge-law,--theorem21", o.edge_law, "edge marginals, edge counts and joint law");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    try {
        CLI::App* s = app.get_subcommands().front();
        apply_config(*s, o);
        if (o.threads == 0) o.threads = 1;
        if (s == sim) return run_simulate(o, out);
        if (s == ver) return run_verify(o, out);
        if (s == sc) return run_scaling(o, out);
        if (s == me) return run_metric(o, out);
        if (s == co) return run_continuum(o, out);
        return run_compare(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "error: bad JSON input: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace mgraph::cli
