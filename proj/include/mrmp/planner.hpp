#pragma once
/**
 * @file
 * @brief dRRT: an RRT over the implicit tensor product of per-robot roadmaps.
 *
 * Each iteration draws a random joint configuration (or the goal, with
 * probability goal_bias), picks its nearest tree vertex under the active
 * metric, and moves every robot greedily to the roadmap neighbour closest to
 * its component of the sample. The joint straight-line motion is checked for
 * collisions before the new vertex is added.
 */

#include "mrmp/errors.hpp"
#include "mrmp/geometry.hpp"
#include "mrmp/metrics.hpp"
#include "mrmp/nn_store.hpp"
#include "mrmp/rng.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mrmp
{
    struct PlannerConfig
    {
        std::size_t roadmap_size = 200; ///< vertices per robot, start and goal included
        std::size_t roadmap_k = 8;
        std::size_t roadmap_retries = 5;
        std::size_t max_vertices = 10000;
        std::size_t max_iterations = 0; ///< 0: 50 * max_vertices
        double goal_bias = 0.05;
        bool stop_at_goal = true; ///< false: grow to max_vertices regardless (exploration studies)
        double resolution = 0.0; ///< 0: robot radius / 4
        std::uint64_t seed = 0;
        std::vector<Metric> metrics{Metric{MetricKind::SumL2}}; ///< more than one: round-robin alternation

        double effective_resolution (const Workspace &w) const { return resolution > 0.0 ? resolution : w.robot_radius () / 4.0; }
        std::size_t effective_max_iterations () const { return max_iterations > 0 ? max_iterations : 50 * max_vertices; }

        void validate () const
        {
            if (roadmap_size == 0 || roadmap_k == 0 || max_vertices == 0)
                throw std::invalid_argument ("planner config: roadmap_size, roadmap_k and max_vertices must be positive");
            if (!(goal_bias >= 0.0 && goal_bias <= 1.0))
                throw std::invalid_argument ("planner config: goal_bias must lie in [0, 1]");
            if (resolution < 0.0)
                throw std::invalid_argument ("planner config: resolution must be positive");
            if (metrics.empty ())
                throw std::invalid_argument ("planner config: at least one metric required");
        }
    };

    // ---------------------------------------------------------------------
    // Single-robot roadmaps
    // ---------------------------------------------------------------------

    /// Straight-line distance in (x, y, radius * theta).
    inline double single_robot_distance (const Workspace &w, const Pose &a, const Pose &b)
    {
        const double dx = b.position.x - a.position.x, dy = b.position.y - a.position.y;
        if (!w.rotating ())
            return std::sqrt (dx * dx + dy * dy);
        const double dt = angular_difference (a.theta, b.theta) * w.robot_radius ();
        return std::sqrt (dx * dx + dy * dy + dt * dt);
    }

    inline bool single_edge_free (const Workspace &w, const Pose &a, const Pose &b, double resolution)
    {
        return edge_free (w, std::span<const Pose> (&a, 1), std::span<const Pose> (&b, 1), resolution);
    }

    struct Roadmap
    {
        std::vector<Pose> vertices;
        std::vector<std::vector<std::uint32_t>> adjacency; ///< sorted neighbour lists
        std::uint32_t start = 0;
        std::uint32_t goal = 0;

        std::size_t edge_count () const
        {
            std::size_t n = 0;
            for (const auto &a : adjacency)
                n += a.size ();
            return n / 2;
        }

        bool connected (std::uint32_t from, std::uint32_t to) const
        {
            std::vector<char> seen (vertices.size (), 0);
            std::queue<std::uint32_t> open;
            open.push (from);
            seen[from] = 1;
            while (!open.empty ())
            {
                const auto v = open.front ();
                open.pop ();
                if (v == to)
                    return true;
                for (auto n : adjacency[v])
                    if (!seen[n])
                    {
                        seen[n] = 1;
                        open.push (n);
                    }
            }
            return false;
        }
    };

    inline Pose sample_pose (const Workspace &w, Rng &rng)
    {
        const Rect &b = w.bounds ();
        Pose p;
        p.position = {rng.uniform (b.x0, b.x1), rng.uniform (b.y0, b.y1)};
        if (w.rotating ())
            p.theta = rng.uniform (-std::numbers::pi, std::numbers::pi);
        return p;
    }

    /// Samples free poses and links each to its k nearest neighbours, growing
    /// the sample set until start and goal share a component.
    inline Roadmap build_roadmap (const Workspace &w, std::size_t robot_index, const Pose &start, const Pose &goal, const PlannerConfig &cfg,
                                  Rng &rng)
    {
        if (!robot_free (w, start))
            throw RoadmapError (robot_index, "start pose is not collision free");
        if (!robot_free (w, goal))
            throw RoadmapError (robot_index, "goal pose is not collision free");

        const double res = cfg.effective_resolution (w);
        Roadmap rm;
        rm.vertices.push_back (start);
        rm.start = 0;
        if (goal == start)
            rm.goal = 0;
        else
        {
            rm.vertices.push_back (goal);
            rm.goal = 1;
        }

        std::set<std::pair<std::uint32_t, std::uint32_t>> tested;
        std::vector<std::set<std::uint32_t>> adj;
        for (std::size_t round = 0; round <= cfg.roadmap_retries; ++round)
        {
            const std::size_t target = cfg.roadmap_size * (round + 1);
            std::size_t attempts = 0;
            const std::size_t attempt_budget = 1000 * std::max<std::size_t> (target, 1);
            while (rm.vertices.size () < target && attempts++ < attempt_budget)
            {
                Pose p = sample_pose (w, rng);
                if (robot_free (w, p))
                    rm.vertices.push_back (p);
            }

            const std::size_t n = rm.vertices.size ();
            adj.resize (n);
            std::vector<std::pair<double, std::uint32_t>> order;
            for (std::uint32_t i = 0; i < n; ++i)
            {
                order.clear ();
                for (std::uint32_t j = 0; j < n; ++j)
                    if (j != i)
                        order.emplace_back (single_robot_distance (w, rm.vertices[i], rm.vertices[j]), j);
                const std::size_t k = std::min (cfg.roadmap_k, order.size ());
                std::partial_sort (order.begin (), order.begin () + static_cast<std::ptrdiff_t> (k), order.end ());
                for (std::size_t t = 0; t < k; ++t)
                {
                    const std::uint32_t j = order[t].second;
                    const auto key = std::minmax (i, j);
                    if (!tested.insert (key).second)
                        continue;
                    if (single_edge_free (w, rm.vertices[i], rm.vertices[j], res))
                    {
                        adj[i].insert (j);
                        adj[j].insert (i);
                    }
                }
            }

            rm.adjacency.assign (n, {});
            for (std::size_t i = 0; i < n; ++i)
                rm.adjacency[i].assign (adj[i].begin (), adj[i].end ());
            if (rm.connected (rm.start, rm.goal))
                return rm;
        }
        throw RoadmapError (robot_index, "start and goal not connected after " + std::to_string (cfg.roadmap_retries + 1) + " sampling rounds");
    }

    // ---------------------------------------------------------------------
    // Tree
    // ---------------------------------------------------------------------

    using VertexTuple = std::vector<std::uint32_t>; ///< roadmap vertex index per robot

    class DrrtTree
    {
      public:
        explicit DrrtTree (std::size_t robots) : robots_ (robots) {}

        std::size_t size () const { return parents_.size (); }
        std::size_t robots () const { return robots_; }

        std::span<const std::uint32_t> tuple (std::size_t id) const { return {indices_.data () + id * robots_, robots_}; }
        std::span<const Pose> config (std::size_t id) const { return {poses_.data () + id * robots_, robots_}; }
        std::int64_t parent (std::size_t id) const { return parents_[id]; }

        std::optional<std::size_t> find (std::span<const std::uint32_t> t) const
        {
            auto it = lookup_.find (key (t));
            if (it == lookup_.end ())
                return std::nullopt;
            return it->second;
        }

        std::size_t add (std::span<const std::uint32_t> t, std::int64_t parent, std::span<const Roadmap> roadmaps)
        {
            const std::size_t id = size ();
            lookup_.emplace (key (t), id);
            indices_.insert (indices_.end (), t.begin (), t.end ());
            for (std::size_t i = 0; i < robots_; ++i)
                poses_.push_back (roadmaps[i].vertices[t[i]]);
            parents_.push_back (parent);
            return id;
        }

      private:
        static std::string key (std::span<const std::uint32_t> t)
        {
            return {reinterpret_cast<const char *> (t.data ()), t.size () * sizeof (std::uint32_t)};
        }

        std::size_t robots_;
        std::vector<std::uint32_t> indices_;
        std::vector<Pose> poses_;
        std::vector<std::int64_t> parents_;
        std::unordered_map<std::string, std::size_t> lookup_;
    };

    /// Per-robot greedy step: each robot moves to the roadmap neighbour (or
    /// stays) minimising its single-robot distance to its target component.
    /// Staying wins ties, then lower roadmap index.
    inline VertexTuple oracle_step (const Workspace &w, std::span<const std::uint32_t> from, std::span<const Pose> target,
                                    std::span<const Roadmap> roadmaps)
    {
        VertexTuple out (from.begin (), from.end ());
        for (std::size_t i = 0; i < from.size (); ++i)
        {
            const Roadmap &rm = roadmaps[i];
            double best = single_robot_distance (w, rm.vertices[from[i]], target[i]);
            for (auto n : rm.adjacency[from[i]])
            {
                const double d = single_robot_distance (w, rm.vertices[n], target[i]);
                if (d < best)
                {
                    best = d;
                    out[i] = n;
                }
            }
        }
        return out;
    }

    enum class ExpandStatus
    {
        Added,
        Duplicate,
        Blocked
    };

    inline std::string_view to_string (ExpandStatus s)
    {
        switch (s)
        {
        case ExpandStatus::Added:
            return "added";
        case ExpandStatus::Duplicate:
            return "duplicate";
        case ExpandStatus::Blocked:
            return "blocked";
        }
        return "?";
    }

    struct ExpandRecord
    {
        std::uint64_t iteration = 0;
        std::uint32_t metric = 0; ///< index into PlannerConfig::metrics
        ExpandStatus status = ExpandStatus::Duplicate;
        std::int64_t vertex = -1; ///< new vertex id when added
    };

    class DrrtPlanner
    {
      public:
        DrrtPlanner (const Workspace &w, std::vector<Roadmap> roadmaps, PlannerConfig cfg)
            : w_ (w), roadmaps_ (std::move (roadmaps)), cfg_ (std::move (cfg)), tree_ (roadmaps_.size ()),
              store_ (cfg_.metrics, roadmaps_.size ()), rng_ (cfg_.seed), resolution_ (cfg_.effective_resolution (w))
        {
            cfg_.validate ();
            VertexTuple root (roadmaps_.size ()), goal (roadmaps_.size ());
            for (std::size_t i = 0; i < roadmaps_.size (); ++i)
            {
                root[i] = roadmaps_[i].start;
                goal[i] = roadmaps_[i].goal;
                goal_config_.push_back (roadmaps_[i].vertices[goal[i]]);
            }
            goal_ = goal;
            add_vertex (root, -1);
        }

        const DrrtTree &tree () const { return tree_; }
        std::span<const Roadmap> roadmaps () const { return roadmaps_; }
        const PlannerConfig &config () const { return cfg_; }
        std::optional<std::size_t> goal_vertex () const { return tree_.find (goal_); }
        std::uint64_t iterations () const { return iteration_; }

        JointConfig random_target ()
        {
            if (rng_.bernoulli (cfg_.goal_bias))
                return goal_config_;
            JointConfig q (roadmaps_.size ());
            for (auto &p : q)
                p = sample_pose (w_, rng_);
            return q;
        }

        ExpandRecord expand () { return expand_toward (random_target ()); }

        ExpandRecord expand_toward (std::span<const Pose> target)
        {
            ExpandRecord rec;
            rec.iteration = iteration_++;
            rec.metric = static_cast<std::uint32_t> (store_.cursor ());
            const Neighbor near = store_.nearest (target);
            const auto near_id = static_cast<std::size_t> (near.id);
            const VertexTuple next = oracle_step (w_, tree_.tuple (near_id), target, roadmaps_);
            if (tree_.find (next))
            {
                rec.status = ExpandStatus::Duplicate;
                return rec;
            }
            JointConfig next_config (next.size ());
            for (std::size_t i = 0; i < next.size (); ++i)
                next_config[i] = roadmaps_[i].vertices[next[i]];
            if (!edge_free (w_, tree_.config (near_id), next_config, resolution_))
            {
                rec.status = ExpandStatus::Blocked;
                return rec;
            }
            rec.status = ExpandStatus::Added;
            rec.vertex = static_cast<std::int64_t> (add_vertex (next, static_cast<std::int64_t> (near_id)));
            return rec;
        }

      private:
        std::size_t add_vertex (std::span<const std::uint32_t> t, std::int64_t parent)
        {
            const std::size_t id = tree_.add (t, parent, roadmaps_);
            store_.insert (tree_.config (id), id);
            return id;
        }

        const Workspace &w_;
        std::vector<Roadmap> roadmaps_;
        PlannerConfig cfg_;
        DrrtTree tree_;
        AlternatingStore store_;
        Rng rng_;
        double resolution_;
        VertexTuple goal_;
        JointConfig goal_config_;
        std::uint64_t iteration_ = 0;
    };

    // ---------------------------------------------------------------------
    // Solve
    // ---------------------------------------------------------------------

    enum class PlanStatus
    {
        Solved,
        Exhausted
    };

    struct PlanResult
    {
        PlanStatus status = PlanStatus::Exhausted;
        std::vector<JointConfig> path;     ///< start to goal, present iff solved
        std::size_t tree_size = 0;         ///< vertices in the tree when the run stopped
        std::vector<JointConfig> explored; ///< tree vertices in discovery order
        std::vector<std::int64_t> parents; ///< parent id per explored vertex, -1 for the root
        std::vector<ExpandRecord> log;     ///< one record per expansion attempt
        std::vector<std::string> metric_labels;
        std::uint64_t seed = 0;
        std::uint64_t iterations = 0;

        bool solved () const { return status == PlanStatus::Solved; }
    };

    inline std::vector<Roadmap> build_roadmaps (const Workspace &w, std::span<const Pose> start, std::span<const Pose> goal,
                                                const PlannerConfig &cfg)
    {
        std::vector<Roadmap> out;
        for (std::size_t i = 0; i < start.size (); ++i)
        {
            Rng rng (Rng::mix (cfg.seed, i + 1));
            out.push_back (build_roadmap (w, i, start[i], goal[i], cfg, rng));
        }
        return out;
    }

    inline PlanResult solve (const Workspace &w, std::span<const Pose> start, std::span<const Pose> goal, const PlannerConfig &cfg)
    {
        cfg.validate ();
        if (start.size () != goal.size () || start.empty ())
            throw std::invalid_argument ("solve: start and goal must have the same, positive robot count");
        if (!joint_free (w, start))
            throw std::invalid_argument ("solve: start configuration is not collision free");
        if (!joint_free (w, goal))
            throw std::invalid_argument ("solve: goal configuration is not collision free");

        PlanResult result;
        result.seed = cfg.seed;
        for (const auto &m : cfg.metrics)
            result.metric_labels.push_back (label (m));

        DrrtPlanner planner (w, build_roadmaps (w, start, goal, cfg), cfg);
        const std::size_t max_iterations = cfg.effective_max_iterations ();
        std::optional<std::size_t> goal_id = planner.goal_vertex ();
        while ((!goal_id || !cfg.stop_at_goal) && planner.tree ().size () < cfg.max_vertices && planner.iterations () < max_iterations)
        {
            const ExpandRecord rec = planner.expand ();
            result.log.push_back (rec);
            if (rec.status == ExpandStatus::Added && !goal_id)
                goal_id = planner.goal_vertex ();
        }

        const DrrtTree &tree = planner.tree ();
        result.tree_size = tree.size ();
        result.iterations = planner.iterations ();
        result.explored.reserve (tree.size ());
        for (std::size_t id = 0; id < tree.size (); ++id)
        {
            const auto c = tree.config (id);
            result.explored.emplace_back (c.begin (), c.end ());
            result.parents.push_back (tree.parent (id));
        }
        if (goal_id)
        {
            result.status = PlanStatus::Solved;
            for (std::int64_t v = static_cast<std::int64_t> (*goal_id); v >= 0; v = tree.parent (static_cast<std::size_t> (v)))
                result.path.push_back (result.explored[static_cast<std::size_t> (v)]);
            std::reverse (result.path.begin (), result.path.end ());
        }
        return result;
    }

    // ---------------------------------------------------------------------
    // Trace export
    // ---------------------------------------------------------------------

    inline void write_poses (std::ostream &os, std::span<const Pose> config)
    {
        char buf[96];
        for (const auto &p : config)
        {
            std::snprintf (buf, sizeof buf, " %.17g %.17g %.17g", p.position.x, p.position.y, p.theta);
            os << buf;
        }
    }

    /**
     * Line-oriented tree trace:
     *
     *     # mrmp-trace v1
     *     # robots=<m> metrics=<label,...> seed=<seed> status=<solved|exhausted>
     *     v <id> <parent> <x1> <y1> <theta1> ... <xm> <ym> <thetam>
     *     e <iteration> <active-metric-label> <added|duplicate|blocked> <new-id|-1>
     *
     * The root `v` record comes first; every added vertex's `v` record follows
     * the `e` record of the expansion that produced it.
     */
    inline void write_trace (std::ostream &os, const PlanResult &r)
    {
        os << "# mrmp-trace v1\n";
        os << "# robots=" << (r.explored.empty () ? 0 : r.explored.front ().size ()) << " metrics=";
        for (std::size_t i = 0; i < r.metric_labels.size (); ++i)
            os << (i ? "," : "") << r.metric_labels[i];
        os << " seed=" << r.seed << " status=" << (r.solved () ? "solved" : "exhausted") << '\n';

        auto vertex_line = [&] (std::size_t id) {
            os << "v " << id << ' ' << r.parents[id];
            write_poses (os, r.explored[id]);
            os << '\n';
        };
        if (!r.explored.empty ())
            vertex_line (0);
        for (const auto &e : r.log)
        {
            os << "e " << e.iteration << ' ' << r.metric_labels[e.metric] << ' ' << to_string (e.status) << ' ' << e.vertex << '\n';
            if (e.status == ExpandStatus::Added)
                vertex_line (static_cast<std::size_t> (e.vertex));
        }
    }

    /// One configuration per line.
    inline void write_path (std::ostream &os, const PlanResult &r)
    {
        os << "# mrmp-path v1 waypoints=" << r.path.size () << '\n';
        for (const auto &c : r.path)
        {
            std::ostringstream tmp;
            write_poses (tmp, c);
            os << tmp.str ().substr (1) << '\n';
        }
    }

} // namespace mrmp
