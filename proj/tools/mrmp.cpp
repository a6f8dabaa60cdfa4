// Command-line front end: planning runs, metric analysis and experiment sweeps.
//
// Exit codes: 0 success / solved, 2 plan exhausted, 3 input error, 4 internal error.

#include "mrmp/analysis.hpp"
#include "mrmp/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

namespace
{
    using namespace mrmp;

    constexpr int exit_exhausted = 2;
    constexpr int exit_input = 3;
    constexpr int exit_internal = 4;

    struct InputError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    std::vector<std::string> split (const std::string &text, char sep)
    {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream is (text);
        while (std::getline (is, cur, sep))
            if (!cur.empty ())
                out.push_back (cur);
        return out;
    }

    /// "eps2" or "eps2@0.7"; `s` overrides the weight when set.
    Metric parse_metric (const std::string &text, std::optional<double> s)
    {
        const auto at = text.find ('@');
        const MetricKind kind = parse_metric_kind (text.substr (0, at));
        double weight = at == std::string::npos ? 1.0 : std::stod (text.substr (at + 1));
        if (s)
            weight = *s;
        return Metric (kind, weight);
    }

    std::vector<Metric> parse_metric_list (const std::string &text, std::optional<double> s)
    {
        std::vector<Metric> out;
        for (const auto &m : split (text, ','))
            out.push_back (parse_metric (m, s));
        if (out.empty ())
            throw InputError ("empty metric list");
        return out;
    }

    std::string fmt (double v, const char *spec = "%.6f")
    {
        if (std::isnan (v))
            return "nan";
        char buf[64];
        std::snprintf (buf, sizeof buf, spec, v);
        return buf;
    }

    /// Writes to a file, or stdout for "-".
    class Output
    {
      public:
        explicit Output (const std::string &path)
        {
            if (path == "-")
                return;
            if (auto dir = std::filesystem::path (path).parent_path (); !dir.empty ())
                std::filesystem::create_directories (dir);
            file_ = std::make_unique<std::ofstream> (path, std::ios::binary);
            if (!*file_)
                throw InputError ("cannot write '" + path + "'");
        }
        std::ostream &stream () { return file_ ? *file_ : std::cout; }

      private:
        std::unique_ptr<std::ofstream> file_;
    };

    struct Common
    {
        std::string scenario;
        std::uint64_t seed = 1;
        std::string robots; ///< "" all, "N" a declared (else first-N) subset, "1,2,5,6" explicit labels
        std::size_t threads = 1;
    };

    void add_common (CLI::App *cmd, Common &c)
    {
        cmd->add_option ("--scenario", c.scenario, "Scenario JSON file")->required ();
        cmd->add_option ("--seed", c.seed, "Master seed")->capture_default_str ();
        cmd->add_option ("--robots", c.robots, "Robot subset: a count N (the scenario's N-robot variant, else robots 1..N) or labels like 1,2,5,6");
        cmd->add_option ("--threads", c.threads, "Worker threads (results do not depend on it)")->capture_default_str ();
    }

    Scenario load (const Common &c)
    {
        Scenario s = load_scenario (c.scenario);
        if (c.robots.empty ())
            return s;
        std::vector<std::size_t> labels;
        for (const auto &t : split (c.robots, ','))
        {
            if (t.find_first_not_of ("0123456789") != std::string::npos)
                throw InputError ("--robots: expected a count or comma-separated labels");
            labels.push_back (std::stoul (t));
        }
        if (labels.size () == 1 && c.robots.find (',') == std::string::npos)
            return with_robots (std::move (s), labels[0]);
        return with_robot_labels (std::move (s), labels);
    }

    const SubstructureSpec &need_substructure (const Scenario &s)
    {
        if (!s.substructure)
            throw ScenarioError ("substructure", "scenario '" + s.name + "' defines none, required by this command");
        return *s.substructure;
    }

    // ------------------------------------------------------------------ plan

    struct PlanArgs
    {
        Common common;
        std::string metric = "sum_l2";
        std::string metrics;
        bool alternate = false;
        std::optional<double> s;
        std::size_t max_vertices = 0;
        std::string out = "out";
    };

    int cmd_plan (const PlanArgs &a)
    {
        const Scenario sc = load (a.common);
        PlannerConfig cfg = sc.planner;
        cfg.seed = a.common.seed;
        if (a.max_vertices)
            cfg.max_vertices = a.max_vertices;
        if (a.alternate && a.metrics.empty ())
            throw InputError ("--alternate needs --metrics K1,K2,...");
        cfg.metrics = a.alternate ? parse_metric_list (a.metrics, a.s) : std::vector<Metric>{parse_metric (a.metric, a.s)};

        const PlanResult r = solve (sc.workspace, sc.start, sc.goal, cfg);

        std::filesystem::create_directories (a.out);
        {
            Output o (a.out + "/path.txt");
            write_path (o.stream (), r);
        }
        {
            Output o (a.out + "/trace.txt");
            write_trace (o.stream (), r);
        }
        nlohmann::json stats{{"scenario", sc.name},         {"robots", sc.robots ()},   {"metrics", r.metric_labels},
                             {"seed", r.seed},              {"status", r.solved () ? "solved" : "exhausted"},
                             {"tree_size", r.tree_size},    {"iterations", r.iterations}, {"path_waypoints", r.path.size ()},
                             {"max_vertices", cfg.max_vertices}};
        Output o (a.out + "/stats.json");
        o.stream () << stats.dump (2) << '\n';
        std::cerr << (r.solved () ? "solved" : "exhausted") << " with " << r.tree_size << " vertices\n";
        return r.solved () ? 0 : exit_exhausted;
    }

    // ----------------------------------------------------------------- gamma

    struct GammaArgs
    {
        Common common;
        std::optional<int> tau;
        std::size_t samples = 2000;
        std::size_t max_pairs = 0;
        std::string metrics = "sum_l2,max_l2,eps2,epsinf,ctd";
        std::optional<double> s;
        bool natural_debug = false;
        bool uniform_cells = false;
        std::size_t bootstrap = 1000;
        std::string out = "-";
    };

    int cmd_gamma (const GammaArgs &a)
    {
        const Scenario sc = load (a.common);
        const SubstructureSpec &spec = need_substructure (sc);
        const int tau = a.tau.value_or (spec.tau);
        if (tau < 0)
            throw InputError ("--tau must be non-negative");
        if (a.samples < 2)
            throw InputError ("--samples must be at least 2");
        const auto metrics = parse_metric_list (a.metrics, a.s);

        Rng rng (a.common.seed);
        const SampleSet set = sample_set (spec, sc.workspace, sc.robots (), a.samples, rng);
        NaturalDistance dk (spec);
        const PairTable pairs = natural_pairs (set, dk, a.max_pairs, Rng::mix (a.common.seed, 2));

        std::vector<DistanceDistributions> dists (metrics.size () + (a.natural_debug ? 1 : 0));
        parallel_for (metrics.size (), a.common.threads, [&] (std::size_t i) { dists[i] = distributions (set, pairs, metrics[i]); });
        if (a.natural_debug)
        {
            std::vector<double> by_pair (pairs.size ());
            for (std::size_t k = 0; k < pairs.size (); ++k)
                by_pair[k] = pairs.alpha[k];
            DistanceDistributions d;
            d.samples = set.configs.size ();
            d.metric = "natural";
            for (std::size_t k = 0; k < pairs.size (); ++k)
                d.by_alpha[pairs.alpha[k]].push_back (by_pair[k]);
            dists.back () = std::move (d);
        }

        GammaOptions opt;
        opt.weighting = a.uniform_cells ? CellWeighting::Uniform : CellWeighting::PairCount;
        opt.bootstrap = a.bootstrap;
        opt.seed = Rng::mix (a.common.seed, 3);

        Output o (a.out);
        auto &os = o.stream ();
        os << "scenario,metric,s,tau,samples,pairs,compared,gamma,ci_low,ci_high\n";
        for (std::size_t i = 0; i < dists.size (); ++i)
        {
            const GammaResult g = gamma (dists[i], tau, opt);
            const bool natural = i == metrics.size ();
            os << sc.name << ',' << (natural ? std::string ("natural") : std::string (to_string (metrics[i].kind))) << ','
               << (natural ? std::string ("1") : fmt (metrics[i].s, "%g")) << ',' << tau << ',' << set.configs.size () << ',' << pairs.size ()
               << ',' << g.pair_count << ',' << fmt (g.gamma) << ',' << fmt (g.ci_low) << ',' << fmt (g.ci_high) << '\n';
        }
        return 0;
    }

    // ----------------------------------------------------------- ec-coverage

    struct CoverageArgs
    {
        Common common;
        std::size_t tree_size = 10000;
        std::size_t reps = 50;
        std::string metrics = "sum_l2,max_l2,eps2,epsinf,ctd";
        std::string out = "-";
    };

    int cmd_ec_coverage (const CoverageArgs &a)
    {
        const Scenario sc = load (a.common);
        const SubstructureSpec &spec = need_substructure (sc);
        if (a.reps == 0 || a.tree_size == 0)
            throw InputError ("--reps and --tree-size must be positive");
        const auto metrics = parse_metric_list (a.metrics, std::nullopt);

        struct Row
        {
            std::size_t tree = 0, distinct = 0;
        };
        std::vector<Row> rows (metrics.size () * a.reps);
        parallel_for (rows.size (), a.common.threads, [&] (std::size_t job) {
            const std::size_t mi = job / a.reps, j = job % a.reps;
            PlannerConfig cfg = sc.planner;
            cfg.metrics = {metrics[mi]};
            cfg.seed = a.common.seed + j;
            cfg.max_vertices = a.tree_size;
            cfg.stop_at_goal = false;
            const PlanResult r = solve (sc.workspace, sc.start, sc.goal, cfg);
            Rng rng (Rng::mix (cfg.seed, 7));
            const auto cov = ec_coverage (spec, sc.workspace, r.explored, r.explored.size (), rng);
            rows[job] = {cov.tree_size, cov.distinct_ec_count};
        });

        Output o (a.out);
        auto &os = o.stream ();
        os << "scenario,metric,rep,seed,tree_size,distinct_ecs\n";
        for (std::size_t job = 0; job < rows.size (); ++job)
        {
            const std::size_t mi = job / a.reps, j = job % a.reps;
            os << sc.name << ',' << label (metrics[mi]) << ',' << j << ',' << a.common.seed + j << ',' << rows[job].tree << ','
               << rows[job].distinct << '\n';
        }
        return 0;
    }

    // -------------------------------------------------------------- sweep-s

    struct SweepArgs
    {
        Common common;
        std::string metric = "eps2";
        std::size_t reps = 50;
        std::string s_values = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
        std::size_t max_vertices = 0;
        std::string out = "-";
    };

    int cmd_sweep_s (const SweepArgs &a)
    {
        const Scenario sc = load (a.common);
        if (!sc.workspace.rotating ())
            throw ScenarioError ("robot", "sweep-s needs a rotating (polygon) robot");
        std::vector<std::vector<Metric>> combos;
        for (const auto &v : split (a.s_values, ','))
            combos.push_back ({parse_metric (a.metric, std::stod (v))});
        PlannerConfig base = sc.planner;
        if (a.max_vertices)
            base.max_vertices = a.max_vertices;
        const ExperimentSummary sum = run_experiment (sc.workspace, sc.start, sc.goal, combos, a.reps, base, a.common.seed, a.common.threads);

        Output o (a.out);
        auto &os = o.stream ();
        os << "scenario,metric,s,reps,solved,success_rate,q1,median,q3\n";
        for (const auto &e : sum.entries)
        {
            std::size_t solved = 0;
            for (const auto &r : e.runs)
                solved += r.solved;
            os << sc.name << ',' << to_string (e.metrics[0].kind) << ',' << fmt (e.metrics[0].s, "%g") << ',' << e.runs.size () << ',' << solved
               << ',' << fmt (e.success_rate, "%.4f") << ',' << fmt (e.vertices.q1, "%.1f") << ',' << fmt (e.vertices.median, "%.1f") << ','
               << fmt (e.vertices.q3, "%.1f") << '\n';
        }
        return 0;
    }

    // ----------------------------------------------------------- experiment

    struct ExperimentArgs
    {
        Common common;
        std::string combos = "sum_l2;max_l2;eps2;epsinf;ctd";
        bool pairs = false;
        std::size_t reps = 20;
        std::size_t max_vertices = 0;
        std::string out = "-";
        std::string summary;
    };

    int cmd_experiment (const ExperimentArgs &a)
    {
        const Scenario sc = load (a.common);
        std::vector<std::vector<Metric>> combos;
        for (const auto &c : split (a.combos, ';'))
        {
            std::vector<Metric> combo;
            for (const auto &m : split (c, '+'))
                combo.push_back (parse_metric (m, std::nullopt));
            combos.push_back (std::move (combo));
        }
        if (a.pairs)
        {
            const auto singles = combos;
            for (std::size_t i = 0; i < singles.size (); ++i)
                for (std::size_t j = i + 1; j < singles.size (); ++j)
                    combos.push_back ({singles[i][0], singles[j][0]});
        }
        if (combos.empty ())
            throw InputError ("no metric combinations given");
        PlannerConfig base = sc.planner;
        if (a.max_vertices)
            base.max_vertices = a.max_vertices;
        const ExperimentSummary sum = run_experiment (sc.workspace, sc.start, sc.goal, combos, a.reps, base, a.common.seed, a.common.threads);

        Output o (a.out);
        auto &os = o.stream ();
        os << "scenario,metric,rep,seed,status,vertices\n";
        for (const auto &e : sum.entries)
            for (std::size_t j = 0; j < e.runs.size (); ++j)
                os << sc.name << ',' << e.label << ',' << j << ',' << e.runs[j].seed << ',' << (e.runs[j].solved ? "solved" : "exhausted") << ','
                   << e.runs[j].vertices << '\n';

        if (!a.summary.empty ())
        {
            nlohmann::json js{{"scenario", sc.name}, {"robots", sc.robots ()}, {"seed", sum.seed}, {"repetitions", sum.repetitions}};
            for (const auto &e : sum.entries)
                js["metrics"].push_back ({{"metric", e.label},
                                          {"success_rate", e.success_rate},
                                          {"q1", std::isnan (e.vertices.q1) ? nlohmann::json () : nlohmann::json (e.vertices.q1)},
                                          {"median", std::isnan (e.vertices.median) ? nlohmann::json () : nlohmann::json (e.vertices.median)},
                                          {"q3", std::isnan (e.vertices.q3) ? nlohmann::json () : nlohmann::json (e.vertices.q3)}});
            Output so (a.summary);
            so.stream () << js.dump (2) << '\n';
        }
        return 0;
    }

} // namespace

int main (int argc, char **argv)
{
    CLI::App app{"Multi-robot motion planning metrics toolkit"};
    app.require_subcommand (1);

    PlanArgs plan;
    auto *p = app.add_subcommand ("plan", "Run dRRT on a scenario; writes path.txt, trace.txt and stats.json");
    add_common (p, plan.common);
    p->add_option ("--metric", plan.metric, "Metric: sum_l2, max_l2, eps2, epsinf or ctd (optionally K@s)")->capture_default_str ();
    p->add_option ("--s", plan.s, "Translation weight s in [0, 1]");
    p->add_flag ("--alternate", plan.alternate, "Round-robin over --metrics");
    p->add_option ("--metrics", plan.metrics, "Comma-separated metrics for --alternate");
    p->add_option ("--max-vertices", plan.max_vertices, "Tree size limit (default from scenario)");
    p->add_option ("--out", plan.out, "Output directory")->capture_default_str ();

    GammaArgs gam;
    auto *g = app.add_subcommand ("gamma", "Distribution separation per metric (CSV)");
    add_common (g, gam.common);
    g->add_option ("--tau", gam.tau, "Natural-distance threshold (default from scenario)");
    g->add_option ("--samples", gam.samples, "Sampled configurations")->capture_default_str ();
    g->add_option ("--max-pairs", gam.max_pairs, "Subsample this many pairs (0: all pairs)")->capture_default_str ();
    g->add_option ("--metrics", gam.metrics, "Comma-separated metrics")->capture_default_str ();
    g->add_option ("--s", gam.s, "Translation weight for every metric");
    g->add_flag ("--natural-debug", gam.natural_debug, "Add a row using the natural distance itself as the metric");
    g->add_flag ("--uniform-cells", gam.uniform_cells, "Weigh (alpha, beta) cells equally instead of by pair count");
    g->add_option ("--bootstrap", gam.bootstrap, "Bootstrap resamples for the 95% interval (0 disables)")->capture_default_str ();
    g->add_option ("--out", gam.out, "CSV path, - for stdout")->capture_default_str ();

    CoverageArgs cov;
    auto *c = app.add_subcommand ("ec-coverage", "Distinct explored ECs per metric and repetition (CSV)");
    add_common (c, cov.common);
    c->add_option ("--tree-size", cov.tree_size, "Tree vertices N")->capture_default_str ();
    c->add_option ("--reps", cov.reps, "Repetitions per metric")->capture_default_str ();
    c->add_option ("--metrics", cov.metrics, "Comma-separated metrics")->capture_default_str ();
    c->add_option ("--out", cov.out, "CSV path, - for stdout")->capture_default_str ();

    SweepArgs sw;
    auto *s = app.add_subcommand ("sweep-s", "Vertex-count quartiles per translation weight s (CSV)");
    add_common (s, sw.common);
    s->add_option ("--metric", sw.metric, "Metric kind")->capture_default_str ();
    s->add_option ("--reps", sw.reps, "Repetitions per s value")->capture_default_str ();
    s->add_option ("--s-values", sw.s_values, "Comma-separated s values")->capture_default_str ();
    s->add_option ("--max-vertices", sw.max_vertices, "Tree size limit (default from scenario)");
    s->add_option ("--out", sw.out, "CSV path, - for stdout")->capture_default_str ();

    ExperimentArgs ex;
    auto *e = app.add_subcommand ("experiment", "Repeated planning runs per metric or alternation (CSV + summary JSON)");
    add_common (e, ex.common);
    e->add_option ("--combos", ex.combos, "Semicolon-separated combos, '+' joins alternated metrics")->capture_default_str ();
    e->add_flag ("--pairs", ex.pairs, "Also run every two-metric alternation of the given singles");
    e->add_option ("--reps", ex.reps, "Repetitions per combo")->capture_default_str ();
    e->add_option ("--max-vertices", ex.max_vertices, "Tree size limit (default from scenario)");
    e->add_option ("--out", ex.out, "Per-run CSV path, - for stdout")->capture_default_str ();
    e->add_option ("--summary", ex.summary, "Summary JSON path");

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::ParseError &err)
    {
        const int code = app.exit (err);
        return code == 0 ? 0 : exit_input;
    }

    try
    {
        if (*p)
            return cmd_plan (plan);
        if (*g)
            return cmd_gamma (gam);
        if (*c)
            return cmd_ec_coverage (cov);
        if (*s)
            return cmd_sweep_s (sw);
        if (*e)
            return cmd_experiment (ex);
    }
    catch (const ScenarioError &err)
    {
        std::cerr << "error: " << err.what () << '\n';
        return exit_input;
    }
    catch (const InputError &err)
    {
        std::cerr << "error: " << err.what () << '\n';
        return exit_input;
    }
    catch (const std::invalid_argument &err)
    {
        std::cerr << "error: " << err.what () << '\n';
        return exit_input;
    }
    catch (const std::exception &err)
    {
        std::cerr << "internal error: " << err.what () << '\n';
        return exit_internal;
    }
    return exit_internal;
}
