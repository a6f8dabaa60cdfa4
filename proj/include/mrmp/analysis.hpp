#pragma once
/**
 * @file
 * @brief Metric-quality tools built on canonical substructures, plus the
 *        repetition harness used by the experiments.
 *
 *  - Distribution separation: for sampled configuration pairs, group metric
 *    distances by natural distance alpha, then estimate
 *    Gamma^tau = Pr[a0 < b0 | a0 ~ D^alpha, b0 ~ D^beta, alpha < beta, alpha <= tau].
 *  - Explored ECs: number of distinct ECs among the first N vertices of a tree.
 */

#include "mrmp/errors.hpp"
#include "mrmp/metrics.hpp"
#include "mrmp/planner.hpp"
#include "mrmp/rng.hpp"
#include "mrmp/substructures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace mrmp
{
    // ---------------------------------------------------------------------
    // Samples and natural distances
    // ---------------------------------------------------------------------

    struct SampleSet
    {
        std::vector<JointConfig> configs;
        std::vector<ECKey> keys;
    };

    inline SampleSet sample_set (const SubstructureSpec &spec, const Workspace &w, std::size_t robots, std::size_t count, Rng &rng)
    {
        SampleSet out;
        out.configs.reserve (count);
        out.keys.reserve (count);
        for (std::size_t i = 0; i < count; ++i)
        {
            out.configs.push_back (sample_configuration (spec, w, robots, rng));
            out.keys.push_back (classify (spec, w, out.configs.back (), rng));
        }
        return out;
    }

    /// Unordered sample pairs with a finite natural distance.
    struct PairTable
    {
        std::vector<std::uint32_t> first, second;
        std::vector<int> alpha;
        std::size_t discarded = 0; ///< unreachable pairs

        std::size_t size () const { return alpha.size (); }
    };

    /// All pairs, or `max_pairs` pairs drawn uniformly (with replacement) when
    /// max_pairs is non-zero and smaller than the full set.
    inline PairTable natural_pairs (const SampleSet &samples, NaturalDistance &dk, std::size_t max_pairs = 0, std::uint64_t seed = 0)
    {
        PairTable t;
        const std::size_t n = samples.keys.size ();
        auto visit = [&] (std::size_t i, std::size_t j) {
            if (auto a = dk (samples.keys[i], samples.keys[j]))
            {
                t.first.push_back (static_cast<std::uint32_t> (i));
                t.second.push_back (static_cast<std::uint32_t> (j));
                t.alpha.push_back (*a);
            }
            else
                ++t.discarded;
        };
        const std::size_t all = n * (n - 1) / 2;
        if (max_pairs == 0 || max_pairs >= all)
        {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    visit (i, j);
            return t;
        }
        Rng rng (seed);
        for (std::size_t k = 0; k < max_pairs; ++k)
        {
            std::size_t i = rng.below (n), j = rng.below (n - 1);
            if (j >= i)
                ++j;
            visit (std::min (i, j), std::max (i, j));
        }
        return t;
    }

    // ---------------------------------------------------------------------
    // Distance distributions and separation
    // ---------------------------------------------------------------------

    struct DistanceDistributions
    {
        std::map<int, std::vector<double>> by_alpha; ///< D^alpha, each sorted ascending
        std::size_t samples = 0;
        std::size_t discarded = 0;
        std::string metric;
    };

    using PairDistance = std::function<double (std::size_t, std::size_t)>;

    inline DistanceDistributions distributions (const SampleSet &samples, const PairTable &pairs, const PairDistance &distance, std::string name)
    {
        DistanceDistributions d;
        d.samples = samples.configs.size ();
        d.discarded = pairs.discarded;
        d.metric = std::move (name);
        for (std::size_t k = 0; k < pairs.size (); ++k)
            d.by_alpha[pairs.alpha[k]].push_back (distance (pairs.first[k], pairs.second[k]));
        for (auto &[alpha, values] : d.by_alpha)
            std::sort (values.begin (), values.end ());
        return d;
    }

    inline DistanceDistributions distributions (const SampleSet &samples, const PairTable &pairs, const Metric &metric)
    {
        return distributions (
            samples, pairs, [&] (std::size_t i, std::size_t j) { return eval (metric, samples.configs[i], samples.configs[j]); }, label (metric));
    }

    /// Convenience for a single metric: sample, classify, pair, group.
    inline DistanceDistributions build_distributions (const SubstructureSpec &spec, const Workspace &w, std::size_t robots, const Metric &metric,
                                                      std::size_t samples, std::uint64_t seed)
    {
        if (samples < 2)
            throw std::invalid_argument ("build_distributions: need at least two samples");
        Rng rng (seed);
        const SampleSet set = sample_set (spec, w, robots, samples, rng);
        NaturalDistance dk (spec);
        return distributions (set, natural_pairs (set, dk), metric);
    }

    enum class CellWeighting
    {
        PairCount, ///< every (a0, b0) comparison weighs the same
        Uniform    ///< every (alpha, beta) cell weighs the same
    };

    struct GammaCell
    {
        int alpha = 0, beta = 0;
        std::uint64_t pairs = 0, successes = 0;
    };

    struct GammaResult
    {
        double gamma = 0.0;
        int tau = 0;
        std::uint64_t pair_count = 0; ///< compared (a0, b0) pairs
        std::vector<GammaCell> cells;
        double ci_low = std::numeric_limits<double>::quiet_NaN ();
        double ci_high = std::numeric_limits<double>::quiet_NaN ();
    };

    struct GammaOptions
    {
        CellWeighting weighting = CellWeighting::PairCount;
        std::size_t bootstrap = 0; ///< resamples for the 95% interval, 0 disables
        std::uint64_t seed = 0;
    };

    namespace detail
    {
        /// Number of b in sorted `bs` with a < b, for every a in sorted `as`, summed.
        inline std::uint64_t count_less (const std::vector<double> &as, const std::vector<double> &bs)
        {
            std::uint64_t total = 0;
            std::size_t j = 0;
            for (double a : as)
            {
                while (j < bs.size () && bs[j] <= a)
                    ++j;
                total += bs.size () - j;
            }
            return total;
        }

        inline double quantile_sorted (const std::vector<double> &v, double p)
        {
            if (v.empty ())
                return std::numeric_limits<double>::quiet_NaN ();
            const double pos = p * static_cast<double> (v.size () - 1);
            const auto lo = static_cast<std::size_t> (std::floor (pos));
            const std::size_t hi = std::min (lo + 1, v.size () - 1);
            return v[lo] + (pos - static_cast<double> (lo)) * (v[hi] - v[lo]);
        }
    } // namespace detail

    /// Ties (a0 == b0) count as failures.
    inline GammaResult gamma (const DistanceDistributions &dists, int tau, const GammaOptions &opt = {})
    {
        GammaResult res;
        res.tau = tau;
        for (const auto &[alpha, as] : dists.by_alpha)
        {
            if (alpha > tau || as.empty ())
                continue;
            for (auto it = dists.by_alpha.upper_bound (alpha); it != dists.by_alpha.end (); ++it)
            {
                if (it->second.empty ())
                    continue;
                GammaCell c{alpha, it->first, static_cast<std::uint64_t> (as.size ()) * it->second.size (), 0};
                c.successes = detail::count_less (as, it->second);
                res.pair_count += c.pairs;
                res.cells.push_back (c);
            }
        }
        if (res.pair_count == 0)
            throw Error ("gamma: no comparable pairs with alpha <= tau < beta available");

        if (opt.weighting == CellWeighting::PairCount)
        {
            std::uint64_t s = 0;
            for (const auto &c : res.cells)
                s += c.successes;
            res.gamma = static_cast<double> (s) / static_cast<double> (res.pair_count);
        }
        else
        {
            double s = 0.0;
            for (const auto &c : res.cells)
                s += static_cast<double> (c.successes) / static_cast<double> (c.pairs);
            res.gamma = s / static_cast<double> (res.cells.size ());
        }

        if (opt.bootstrap > 0 && opt.weighting == CellWeighting::PairCount)
        {
            // Resample the alpha-side distances; each carries its success count
            // and comparison weight against every larger natural distance.
            std::vector<double> wins, weights;
            for (const auto &[alpha, as] : dists.by_alpha)
            {
                if (alpha > tau)
                    continue;
                std::vector<double> above;
                for (auto it = dists.by_alpha.upper_bound (alpha); it != dists.by_alpha.end (); ++it)
                    above.insert (above.end (), it->second.begin (), it->second.end ());
                std::sort (above.begin (), above.end ());
                for (double a : as)
                {
                    const auto greater = static_cast<double> (above.end () - std::upper_bound (above.begin (), above.end (), a));
                    wins.push_back (greater);
                    weights.push_back (static_cast<double> (above.size ()));
                }
            }
            Rng rng (opt.seed);
            std::vector<double> stats;
            stats.reserve (opt.bootstrap);
            for (std::size_t b = 0; b < opt.bootstrap; ++b)
            {
                double num = 0.0, den = 0.0;
                for (std::size_t k = 0; k < wins.size (); ++k)
                {
                    const auto pick = rng.below (wins.size ());
                    num += wins[pick];
                    den += weights[pick];
                }
                stats.push_back (den > 0.0 ? num / den : 0.0);
            }
            std::sort (stats.begin (), stats.end ());
            res.ci_low = detail::quantile_sorted (stats, 0.025);
            res.ci_high = detail::quantile_sorted (stats, 0.975);
        }
        return res;
    }

    // ---------------------------------------------------------------------
    // Explored equivalence classes
    // ---------------------------------------------------------------------

    struct EcCoverageResult
    {
        std::size_t distinct_ec_count = 0;
        std::size_t tree_size = 0;
        std::vector<std::pair<ECKey, std::size_t>> first_discovery; ///< class and the vertex index that found it
    };

    inline EcCoverageResult ec_coverage (const SubstructureSpec &spec, const Workspace &w, std::span<const JointConfig> vertices, std::size_t n,
                                         Rng &rng)
    {
        if (vertices.size () < n)
            throw std::invalid_argument ("ec_coverage: tree holds fewer than N vertices");
        EcCoverageResult res;
        res.tree_size = n;
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < n; ++i)
        {
            ECKey k = classify (spec, w, vertices[i], rng);
            if (seen.emplace (k.encode (), i).second)
                res.first_discovery.emplace_back (std::move (k), i);
        }
        res.distinct_ec_count = seen.size ();
        return res;
    }

    // ---------------------------------------------------------------------
    // Repetitions
    // ---------------------------------------------------------------------

    struct Quartiles
    {
        double q1 = std::numeric_limits<double>::quiet_NaN ();
        double median = std::numeric_limits<double>::quiet_NaN ();
        double q3 = std::numeric_limits<double>::quiet_NaN ();
    };

    /// Linear interpolation between order statistics (position p * (n - 1)).
    inline Quartiles quartiles (std::vector<double> v)
    {
        std::sort (v.begin (), v.end ());
        return {detail::quantile_sorted (v, 0.25), detail::quantile_sorted (v, 0.5), detail::quantile_sorted (v, 0.75)};
    }

    /// Runs job(i) for i in [0, count) on `threads` workers. Each job writes
    /// only its own slot, so results do not depend on scheduling.
    inline void parallel_for (std::size_t count, std::size_t threads, const std::function<void (std::size_t)> &job)
    {
        threads = std::max<std::size_t> (1, std::min (threads, count));
        if (threads == 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                job (i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors (threads);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back ([&, t] {
                try
                {
                    for (std::size_t i = next++; i < count; i = next++)
                        job (i);
                }
                catch (...)
                {
                    errors[t] = std::current_exception ();
                }
            });
        for (auto &th : pool)
            th.join ();
        for (auto &e : errors)
            if (e)
                std::rethrow_exception (e);
    }

    struct RunRecord
    {
        std::uint64_t seed = 0;
        bool solved = false;
        std::size_t vertices = 0;
    };

    struct MetricSummary
    {
        std::string label; ///< "eps2", or "eps2+sum_l2" for an alternation
        std::vector<Metric> metrics;
        std::vector<RunRecord> runs;
        double success_rate = 0.0;
        Quartiles vertices; ///< over solved runs only
    };

    struct ExperimentSummary
    {
        std::vector<MetricSummary> entries;
        std::uint64_t seed = 0;
        std::size_t repetitions = 0;
    };

    inline std::string combo_label (std::span<const Metric> combo)
    {
        std::string out;
        for (std::size_t i = 0; i < combo.size (); ++i)
            out += (i ? "+" : "") + label (combo[i]);
        return out;
    }

    inline void summarize (MetricSummary &s)
    {
        std::vector<double> solved;
        for (const auto &r : s.runs)
            if (r.solved)
                solved.push_back (static_cast<double> (r.vertices));
        s.success_rate = s.runs.empty () ? 0.0 : static_cast<double> (solved.size ()) / static_cast<double> (s.runs.size ());
        s.vertices = quartiles (solved);
    }

    /// Repetition j of every combo runs with seed seed0 + j.
    inline ExperimentSummary run_experiment (const Workspace &w, std::span<const Pose> start, std::span<const Pose> goal,
                                             const std::vector<std::vector<Metric>> &combos, std::size_t repetitions, const PlannerConfig &base,
                                             std::uint64_t seed0, std::size_t threads = 1)
    {
        if (repetitions == 0)
            throw std::invalid_argument ("run_experiment: repetitions must be at least 1");
        ExperimentSummary out;
        out.seed = seed0;
        out.repetitions = repetitions;
        for (const auto &c : combos)
            out.entries.push_back ({combo_label (c), c, std::vector<RunRecord> (repetitions), 0.0, {}});

        parallel_for (combos.size () * repetitions, threads, [&] (std::size_t job) {
            const std::size_t c = job / repetitions, j = job % repetitions;
            PlannerConfig cfg = base;
            cfg.metrics = combos[c];
            cfg.seed = seed0 + j;
            const PlanResult r = solve (w, start, goal, cfg);
            out.entries[c].runs[j] = {cfg.seed, r.solved (), r.tree_size};
        });
        for (auto &e : out.entries)
            summarize (e);
        return out;
    }

} // namespace mrmp
