#pragma once
/**
 * @file
 * @brief Canonical substructures of the joint configuration space: their
 *        equivalence classes (ECs), the EC graph, and the natural distance
 *        (BFS hop count on that graph).
 *
 * Three kinds are supported:
 *  - Permutations: robots in narrow arms meeting at a junction. An EC is the
 *    ordered list of robots per arm, listed from the far end of the arm
 *    towards the junction. Only the junction-most robot of an arm can leave,
 *    and it enters another arm at its junction end.
 *  - Partitions: robots in chambers they can leave in any order. An EC is the
 *    set of robots per chamber; one robot moves to an adjacent chamber.
 *  - Pebbles: a 3x3 grid of cells holding at most one robot each. One robot
 *    moves into an empty grid-adjacent cell.
 */

#include "mrmp/errors.hpp"
#include "mrmp/geometry.hpp"
#include "mrmp/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mrmp
{
    enum class SubstructureKind
    {
        Permutations,
        Partitions,
        Pebbles
    };

    inline std::string_view to_string (SubstructureKind k)
    {
        switch (k)
        {
        case SubstructureKind::Permutations:
            return "permutations";
        case SubstructureKind::Partitions:
            return "partitions";
        case SubstructureKind::Pebbles:
            return "pebbles";
        }
        return "?";
    }

    inline SubstructureKind parse_substructure_kind (std::string_view s)
    {
        if (s == "permutations")
            return SubstructureKind::Permutations;
        if (s == "partitions")
            return SubstructureKind::Partitions;
        if (s == "pebbles")
            return SubstructureKind::Pebbles;
        throw std::invalid_argument ("unknown substructure kind '" + std::string (s) + "'");
    }

    struct Region
    {
        std::string name;
        Rect rect;
        char axis = 'x';    ///< permutations: coordinate robots are ordered by
        int direction = +1; ///< permutations: +1 increasing, -1 decreasing

        friend bool operator== (const Region &, const Region &) = default;
    };

    struct SubstructureSpec
    {
        SubstructureKind kind = SubstructureKind::Permutations;
        std::vector<Region> regions;
        std::vector<std::pair<int, int>> adjacency; ///< empty: all pairs (pebbles: 3x3 grid)
        std::vector<int> capacity;                  ///< empty: uncapped
        int depth_cap = -1;                         ///< BFS depth limit, -1 unlimited
        int tau = 0;                                ///< default threshold for the separation estimate

        std::size_t region_count () const { return regions.size (); }

        bool adjacent (std::size_t a, std::size_t b) const
        {
            if (a == b)
                return false;
            if (adjacency.empty ())
            {
                if (kind != SubstructureKind::Pebbles)
                    return true;
                const auto ra = a / 3, ca = a % 3, rb = b / 3, cb = b % 3;
                return (ra == rb && (ca + 1 == cb || cb + 1 == ca)) || (ca == cb && (ra + 1 == rb || rb + 1 == ra));
            }
            for (auto [x, y] : adjacency)
                if ((static_cast<std::size_t> (x) == a && static_cast<std::size_t> (y) == b) ||
                    (static_cast<std::size_t> (x) == b && static_cast<std::size_t> (y) == a))
                    return true;
            return false;
        }

        std::size_t capacity_of (std::size_t region, std::size_t robots) const
        {
            if (kind == SubstructureKind::Pebbles)
                return 1;
            return capacity.empty () ? robots : static_cast<std::size_t> (capacity[region]);
        }

        /// Throws ScenarioError naming the offending field.
        void validate (std::size_t robots) const
        {
            if (regions.empty ())
                throw ScenarioError ("substructure.regions", "at least one region required");
            if (kind == SubstructureKind::Pebbles && regions.size () != 9)
                throw ScenarioError ("substructure.regions", "pebbles needs exactly 9 cells (3x3, row-major)");
            if (robots + regions.size () > 250)
                throw ScenarioError ("substructure.regions", "too many robots and regions");
            if (kind == SubstructureKind::Pebbles && robots > 9)
                throw ScenarioError ("substructure", "pebbles holds at most 9 robots");
            for (std::size_t i = 0; i < regions.size (); ++i)
            {
                const auto &r = regions[i].rect;
                const std::string f = "substructure.regions[" + std::to_string (i) + "]";
                if (!(r.x1 > r.x0 && r.y1 > r.y0))
                    throw ScenarioError (f + ".rect", "empty rectangle");
                if (regions[i].axis != 'x' && regions[i].axis != 'y')
                    throw ScenarioError (f + ".axis", "must be 'x' or 'y'");
                if (regions[i].direction != 1 && regions[i].direction != -1)
                    throw ScenarioError (f + ".order", "must be increasing or decreasing");
                for (std::size_t j = 0; j < i; ++j)
                {
                    const auto &q = regions[j].rect;
                    if (r.x0 < q.x1 && q.x0 < r.x1 && r.y0 < q.y1 && q.y0 < r.y1)
                        throw ScenarioError (f + ".rect", "overlaps region " + std::to_string (j));
                }
            }
            for (auto [a, b] : adjacency)
                if (a < 0 || b < 0 || static_cast<std::size_t> (a) >= regions.size () || static_cast<std::size_t> (b) >= regions.size () || a == b)
                    throw ScenarioError ("substructure.adjacency", "invalid region pair");
            if (!capacity.empty () && capacity.size () != regions.size ())
                throw ScenarioError ("substructure.capacity", "one entry per region required");
            std::size_t total = 0;
            for (int c : capacity)
            {
                if (c < 0)
                    throw ScenarioError ("substructure.capacity", "must be non-negative");
                total += static_cast<std::size_t> (c);
            }
            if (!capacity.empty () && total < robots)
                throw ScenarioError ("substructure.capacity", "regions cannot hold all robots");
        }
    };

    // ---------------------------------------------------------------------
    // EC keys
    // ---------------------------------------------------------------------

    /// Robots (0-based) per region. Permutations keep arm order; the other
    /// kinds store sorted sets, so equal classes compare equal.
    struct ECKey
    {
        SubstructureKind kind = SubstructureKind::Permutations;
        std::vector<std::vector<int>> groups;

        std::size_t robot_count () const
        {
            std::size_t n = 0;
            for (const auto &g : groups)
                n += g.size ();
            return n;
        }

        void canonicalize ()
        {
            if (kind != SubstructureKind::Permutations)
                for (auto &g : groups)
                    std::sort (g.begin (), g.end ());
        }

        /// Compact byte encoding: robot ids per region, 0xff closes a region.
        std::string encode () const
        {
            std::string out;
            out.reserve (robot_count () + groups.size ());
            for (const auto &g : groups)
            {
                for (int r : g)
                    out.push_back (static_cast<char> (r));
                out.push_back (static_cast<char> (0xff));
            }
            return out;
        }

        static ECKey decode (SubstructureKind kind, std::string_view bytes)
        {
            ECKey k{kind, {{}}};
            for (std::size_t i = 0; i < bytes.size (); ++i)
            {
                const auto b = static_cast<unsigned char> (bytes[i]);
                if (b == 0xff)
                {
                    if (i + 1 < bytes.size ())
                        k.groups.emplace_back ();
                }
                else
                    k.groups.back ().push_back (b);
            }
            return k;
        }

        friend bool operator== (const ECKey &, const ECKey &) = default;
    };

    /// "[(3,2,5,4),(),(1,6)]" for permutations, "[{1,5,8},{4,6,7},{2,3}]" otherwise (1-based labels).
    inline std::string to_string (const ECKey &k)
    {
        const bool ordered = k.kind == SubstructureKind::Permutations;
        std::ostringstream os;
        os << '[';
        for (std::size_t g = 0; g < k.groups.size (); ++g)
        {
            os << (g ? "," : "") << (ordered ? '(' : '{');
            for (std::size_t i = 0; i < k.groups[g].size (); ++i)
                os << (i ? "," : "") << k.groups[g][i] + 1;
            os << (ordered ? ')' : '}');
        }
        os << ']';
        return os.str ();
    }

    /// Inverse of to_string; either bracket style is accepted.
    inline ECKey parse_key (SubstructureKind kind, std::string_view text)
    {
        ECKey k{kind, {}};
        bool open = false;
        int number = -1;
        for (char c : text)
        {
            if (c == '(' || c == '{')
            {
                if (open)
                    throw std::invalid_argument ("parse_key: nested group in '" + std::string (text) + "'");
                open = true;
                k.groups.emplace_back ();
            }
            else if (c >= '0' && c <= '9')
            {
                if (!open)
                    throw std::invalid_argument ("parse_key: label outside group in '" + std::string (text) + "'");
                number = (number < 0 ? 0 : number * 10) + (c - '0');
            }
            else if (c == ',' || c == ')' || c == '}')
            {
                if (number >= 0)
                {
                    if (number == 0)
                        throw std::invalid_argument ("parse_key: robot labels are 1-based");
                    k.groups.back ().push_back (number - 1);
                    number = -1;
                }
                if (c != ',')
                    open = false;
            }
        }
        if (open)
            throw std::invalid_argument ("parse_key: unterminated group in '" + std::string (text) + "'");
        k.canonicalize ();
        return k;
    }

    // ---------------------------------------------------------------------
    // Equivalence graph
    // ---------------------------------------------------------------------

    inline std::vector<ECKey> neighbors (const SubstructureSpec &spec, const ECKey &k)
    {
        std::vector<ECKey> out;
        const std::size_t robots = k.robot_count ();
        const std::size_t n = k.groups.size ();
        for (std::size_t from = 0; from < n; ++from)
        {
            if (k.groups[from].empty ())
                continue;
            for (std::size_t to = 0; to < n; ++to)
            {
                if (!spec.adjacent (from, to) || k.groups[to].size () >= spec.capacity_of (to, robots))
                    continue;
                if (spec.kind == SubstructureKind::Permutations)
                {
                    ECKey next = k;
                    const int robot = next.groups[from].back ();
                    next.groups[from].pop_back ();
                    next.groups[to].push_back (robot);
                    out.push_back (std::move (next));
                    continue;
                }
                for (std::size_t i = 0; i < k.groups[from].size (); ++i)
                {
                    ECKey next = k;
                    const int robot = next.groups[from][i];
                    next.groups[from].erase (next.groups[from].begin () + static_cast<std::ptrdiff_t> (i));
                    next.groups[to].insert (std::upper_bound (next.groups[to].begin (), next.groups[to].end (), robot), robot);
                    out.push_back (std::move (next));
                }
            }
        }
        return out;
    }

    /**
     * Natural distance between EC keys by breadth-first search.
     *
     * Every neighbour rule is invariant under renaming robots, so the pair
     * (a, b) is first relabelled so that b reads 0, 1, 2, ... in region order.
     * Searches then only start from these label-free "shapes" and each one
     * is memoised, giving d(a, b) = d(relabel(a), shape(b)).
     */
    class NaturalDistance
    {
      public:
        explicit NaturalDistance (SubstructureSpec spec) : spec_ (std::move (spec)) {}

        const SubstructureSpec &spec () const { return spec_; }

        /// nullopt when b is unreachable from a (or beyond the depth cap).
        std::optional<int> operator() (const ECKey &a, const ECKey &b)
        {
            if (a.groups.size () != b.groups.size () || a.robot_count () != b.robot_count ())
                throw std::invalid_argument ("natural distance: keys belong to different substructures");
            const std::size_t robots = b.robot_count ();
            std::vector<int> relabel (robots, -1);
            int next = 0;
            for (const auto &g : b.groups)
                for (int r : g)
                    relabel[static_cast<std::size_t> (r)] = next++;

            ECKey source{b.kind, b.groups};
            for (auto &g : source.groups)
                for (int &r : g)
                    r = relabel[static_cast<std::size_t> (r)];
            ECKey target{a.kind, a.groups};
            for (auto &g : target.groups)
                for (int &r : g)
                {
                    if (r < 0 || static_cast<std::size_t> (r) >= robots || relabel[static_cast<std::size_t> (r)] < 0)
                        throw std::invalid_argument ("natural distance: keys hold different robots");
                    r = relabel[static_cast<std::size_t> (r)];
                }
            target.canonicalize ();

            const auto &layer = search_from (source);
            auto it = layer.find (target.encode ());
            if (it == layer.end ())
                return std::nullopt;
            return it->second;
        }

        std::size_t cached_searches () const { return memo_.size (); }

        /// Every key reachable from `source` with its distance.
        const std::unordered_map<std::string, int> &search_from (const ECKey &source)
        {
            const std::string root = source.encode ();
            auto found = memo_.find (root);
            if (found != memo_.end ())
                return found->second;

            std::unordered_map<std::string, int> dist;
            dist.emplace (root, 0);
            std::deque<std::pair<std::string, int>> open{{root, 0}};
            while (!open.empty ())
            {
                auto [code, d] = std::move (open.front ());
                open.pop_front ();
                if (spec_.depth_cap >= 0 && d >= spec_.depth_cap)
                    continue;
                for (const auto &n : neighbors (spec_, ECKey::decode (spec_.kind, code)))
                {
                    std::string c = n.encode ();
                    if (dist.emplace (c, d + 1).second)
                        open.emplace_back (std::move (c), d + 1);
                }
            }
            return memo_.emplace (root, std::move (dist)).first->second;
        }

      private:
        SubstructureSpec spec_;
        std::unordered_map<std::string, std::unordered_map<std::string, int>> memo_;
    };

    // ---------------------------------------------------------------------
    // Classification and sampling
    // ---------------------------------------------------------------------

    namespace detail
    {
        inline double footprint_overlap (const Workspace &w, const Pose &p, const Rect &r)
        {
            if (w.robot ().is_disc ())
                return disc_rect_intersection_area (p.position, w.robot_radius (), r);
            // polygon robots: centre containment stands in for area
            return r.contains (p.position) ? 1.0 : 0.0;
        }

        inline bool same_area (double a, double b, double scale) { return std::abs (a - b) <= 1e-12 * scale; }
    } // namespace detail

    inline ECKey classify (const SubstructureSpec &spec, const Workspace &w, std::span<const Pose> u, Rng &rng)
    {
        const std::size_t n = spec.regions.size ();
        ECKey key{spec.kind, std::vector<std::vector<int>> (n)};

        if (spec.kind == SubstructureKind::Permutations)
        {
            for (std::size_t i = 0; i < u.size (); ++i)
            {
                std::size_t region = n;
                for (std::size_t r = 0; r < n && region == n; ++r)
                    if (spec.regions[r].rect.contains (u[i].position))
                        region = r;
                if (region == n)
                    throw ClassificationError ("robot " + std::to_string (i + 1) + " lies outside every region");
                key.groups[region].push_back (static_cast<int> (i));
            }
            for (std::size_t r = 0; r < n; ++r)
            {
                const Region &reg = spec.regions[r];
                auto coord = [&] (int robot) {
                    const auto &p = u[static_cast<std::size_t> (robot)].position;
                    return reg.direction * (reg.axis == 'x' ? p.x : p.y);
                };
                std::stable_sort (key.groups[r].begin (), key.groups[r].end (), [&] (int a, int b) { return coord (a) < coord (b); });
            }
            return key;
        }

        const double scale = std::numbers::pi * w.robot_radius () * w.robot_radius ();
        std::vector<std::vector<double>> overlap (u.size (), std::vector<double> (n, 0.0));
        for (std::size_t i = 0; i < u.size (); ++i)
            for (std::size_t r = 0; r < n; ++r)
                overlap[i][r] = detail::footprint_overlap (w, u[i], spec.regions[r].rect);

        if (spec.kind == SubstructureKind::Partitions)
        {
            for (std::size_t i = 0; i < u.size (); ++i)
            {
                const double best = *std::max_element (overlap[i].begin (), overlap[i].end ());
                if (!(best > 0.0))
                    throw ClassificationError ("robot " + std::to_string (i + 1) + " lies outside every region");
                std::vector<std::size_t> ties;
                for (std::size_t r = 0; r < n; ++r)
                    if (detail::same_area (overlap[i][r], best, scale))
                        ties.push_back (r);
                const std::size_t pick = ties.size () == 1 ? ties[0] : ties[rng.below (ties.size ())];
                key.groups[pick].push_back (static_cast<int> (i));
            }
            key.canonicalize ();
            return key;
        }

        // Pebbles: greedy matching by decreasing overlap, random order within ties.
        struct Candidate
        {
            double area;
            std::size_t robot, cell;
        };
        std::vector<Candidate> cands;
        for (std::size_t i = 0; i < u.size (); ++i)
            for (std::size_t r = 0; r < n; ++r)
                if (overlap[i][r] > 0.0)
                    cands.push_back ({overlap[i][r], i, r});
        std::stable_sort (cands.begin (), cands.end (), [] (const Candidate &a, const Candidate &b) { return a.area > b.area; });
        for (std::size_t lo = 0; lo < cands.size ();)
        {
            std::size_t hi = lo + 1;
            while (hi < cands.size () && detail::same_area (cands[hi].area, cands[lo].area, scale))
                ++hi;
            for (std::size_t k = hi - lo; k > 1; --k)
                std::swap (cands[lo + k - 1], cands[lo + rng.below (k)]);
            lo = hi;
        }
        std::vector<int> cell_of (u.size (), -1);
        std::vector<char> taken (n, 0);
        for (const auto &c : cands)
            if (cell_of[c.robot] < 0 && !taken[c.cell])
            {
                cell_of[c.robot] = static_cast<int> (c.cell);
                taken[c.cell] = 1;
            }
        for (std::size_t i = 0; i < u.size (); ++i)
        {
            if (cell_of[i] >= 0)
                continue;
            if (std::all_of (overlap[i].begin (), overlap[i].end (), [] (double a) { return a <= 0.0; }))
                throw ClassificationError ("robot " + std::to_string (i + 1) + " lies outside every cell");
            // every overlapped cell is taken: nearest free cell
            double best = std::numeric_limits<double>::infinity ();
            std::size_t pick = n;
            for (std::size_t r = 0; r < n; ++r)
            {
                if (taken[r])
                    continue;
                const Rect &rc = spec.regions[r].rect;
                const double d = norm (u[i].position - Point2{0.5 * (rc.x0 + rc.x1), 0.5 * (rc.y0 + rc.y1)});
                if (d < best)
                {
                    best = d;
                    pick = r;
                }
            }
            if (pick == n)
                throw ClassificationError ("more robots than cells");
            cell_of[i] = static_cast<int> (pick);
            taken[pick] = 1;
        }
        for (std::size_t i = 0; i < u.size (); ++i)
            key.groups[static_cast<std::size_t> (cell_of[i])].push_back (static_cast<int> (i));
        return key;
    }

    /// Uniform over joint-free configurations whose robot centres lie in the
    /// substructure regions: each robot is drawn from its own free region set
    /// (independent per robot), then the whole configuration is rejected on
    /// any robot-robot contact.
    inline JointConfig sample_configuration (const SubstructureSpec &spec, const Workspace &w, std::size_t robots, Rng &rng,
                                             std::size_t max_attempts = 1000000)
    {
        double total = 0.0;
        for (const auto &r : spec.regions)
            total += r.rect.area ();

        auto draw_robot = [&] () -> std::optional<Pose> {
            for (std::size_t attempt = 0; attempt < 100000; ++attempt)
            {
                double pick = rng.uniform () * total;
                const Region *reg = &spec.regions.back ();
                for (const auto &r : spec.regions)
                {
                    if (pick < r.rect.area ())
                    {
                        reg = &r;
                        break;
                    }
                    pick -= r.rect.area ();
                }
                Pose p;
                p.position = {rng.uniform (reg->rect.x0, reg->rect.x1), rng.uniform (reg->rect.y0, reg->rect.y1)};
                if (w.rotating ())
                    p.theta = rng.uniform (-std::numbers::pi, std::numbers::pi);
                if (robot_free (w, p))
                    return p;
            }
            return std::nullopt;
        };

        JointConfig u (robots);
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt)
        {
            bool ok = true;
            for (std::size_t i = 0; i < robots && ok; ++i)
            {
                auto p = draw_robot ();
                if (!p)
                    throw SamplingError ("no collision-free robot placement found inside the substructure regions");
                u[i] = *p;
                for (std::size_t j = 0; j < i && ok; ++j)
                    ok = pair_free (w, u[i], u[j]);
            }
            if (ok)
                return u;
        }
        throw SamplingError ("rejection budget exhausted after " + std::to_string (max_attempts) + " joint attempts");
    }

} // namespace mrmp
