#include "mrmp/substructures.hpp"
#include "tunnel_graph.hpp"

#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

namespace mrmp
{
namespace
{

Pose at (double x, double y) { return Pose{{x, y}, 0.0}; }

// T-shaped tunnel, arms of width 5; the upper arm owns the junction square
constexpr double kArm = 16.0, kUp = 30.0;

Workspace tunnel ()
{
    Polygon b ({{-kArm, -2.5}, {kArm, -2.5}, {kArm, 2.5}, {2.5, 2.5}, {2.5, kUp}, {-2.5, kUp}, {-2.5, 2.5}, {-kArm, 2.5}});
    return Workspace (std::move (b), {}, RobotShape{2.0, {}});
}

SubstructureSpec tunnel_spec ()
{
    SubstructureSpec s;
    s.kind = SubstructureKind::Permutations;
    s.regions = {{"upper", {-2.5, -2.5, 2.5, kUp}, 'y', -1}, {"right", {2.5, -2.5, kArm, 2.5}, 'x', -1}, {"left", {-kArm, -2.5, -2.5, 2.5}, 'x', +1}};
    return s;
}

// three 15-wide chambers: A the left half, B top right, C bottom right
Workspace chambers ()
{
    Polygon room ({{0, 0}, {30, 0}, {30, 30}, {0, 30}});
    return Workspace (std::move (room), {}, RobotShape{2.0, {}});
}

SubstructureSpec chambers_spec ()
{
    SubstructureSpec s;
    s.kind = SubstructureKind::Partitions;
    s.regions = {{"A", {0, 0, 15, 30}}, {"B", {15, 15, 30, 30}}, {"C", {15, 0, 30, 15}}};
    return s;
}

Workspace puzzle ()
{
    Polygon sq ({{0, 0}, {21, 0}, {21, 21}, {0, 21}});
    return Workspace (std::move (sq), {}, RobotShape{2.0, {}});
}

SubstructureSpec puzzle_spec ()
{
    SubstructureSpec s;
    s.kind = SubstructureKind::Pebbles;
    for (int k = 0; k < 9; ++k)
    {
        const double q = k % 3, r = k / 3;
        s.regions.push_back ({"c" + std::to_string (k), {7 * q, 7 * (2 - r), 7 * (q + 1), 7 * (3 - r)}});
    }
    return s;
}

Point2 cell_centre (int k) { return {7.0 * (k % 3) + 3.5, 7.0 * (2 - k / 3) + 3.5}; }

ECKey key (SubstructureKind kind, std::string_view s) { return parse_key (kind, s); }

TEST (ECKey, TextRoundTrip)
{
    for (auto text : {"[(3,2,5,4),(),(1,6)]", "[(),(),()]", "[(10,1)]"})
        EXPECT_EQ (to_string (key (SubstructureKind::Permutations, text)), text);
    // set kinds are canonicalised
    EXPECT_EQ (to_string (key (SubstructureKind::Partitions, "[{8,1,5},{4,6,7},{3,2}]")), "[{1,5,8},{4,6,7},{2,3}]");
    EXPECT_EQ (key (SubstructureKind::Partitions, "[{2,1},{}]"), key (SubstructureKind::Partitions, "[{1,2},{}]"));
    EXPECT_NE (key (SubstructureKind::Permutations, "[(2,1),()]"), key (SubstructureKind::Permutations, "[(1,2),()]"));
    EXPECT_THROW (key (SubstructureKind::Partitions, "[{0,1}]"), std::invalid_argument);
    EXPECT_THROW (key (SubstructureKind::Partitions, "[{1,2"), std::invalid_argument);
}

TEST (ECKey, EncodeDecode)
{
    for (auto text : {"[(3,2,5,4),(),(1,6)]", "[(),(),(1)]", "[(1),(),()]", "[(),()]"})
    {
        const ECKey k = key (SubstructureKind::Permutations, text);
        EXPECT_EQ (ECKey::decode (k.kind, k.encode ()), k) << text;
    }
}

TEST (Spec, Validation)
{
    EXPECT_NO_THROW (tunnel_spec ().validate (6));
    EXPECT_NO_THROW (puzzle_spec ().validate (8));
    SubstructureSpec s = chambers_spec ();
    s.regions[1].rect.x0 = 14;
    EXPECT_THROW (s.validate (4), ScenarioError);
    s = puzzle_spec ();
    s.regions.pop_back ();
    EXPECT_THROW (s.validate (4), ScenarioError);
    EXPECT_THROW (puzzle_spec ().validate (10), ScenarioError);
    s = chambers_spec ();
    s.capacity = {1, 1, 1};
    EXPECT_THROW (s.validate (4), ScenarioError);
    s.capacity = {1, 1};
    EXPECT_THROW (s.validate (2), ScenarioError);
}

TEST (Neighbors, ArmTransitionExample)
{
    const auto spec = tunnel_spec ();
    const ECKey a = key (SubstructureKind::Permutations, "[(3,4,2),(5,6,1),()]");
    const ECKey b = key (SubstructureKind::Permutations, "[(3,4,2,1),(5,6),()]");
    const auto na = neighbors (spec, a), nb = neighbors (spec, b);
    EXPECT_NE (std::find (na.begin (), na.end (), b), na.end ());
    EXPECT_NE (std::find (nb.begin (), nb.end (), a), nb.end ());
    // only the junction-end robot of an arm may leave it
    EXPECT_EQ (std::find (na.begin (), na.end (), key (SubstructureKind::Permutations, "[(4,2,1),(5,6),(3)]")), na.end ());
}

using oracle::kTwoRobotEdges;

TEST (Neighbors, TwoRobotTunnelGraph)
{
    const auto spec = tunnel_spec ();
    std::set<std::pair<std::string, std::string>> expected;
    std::set<std::string> expected_vertices;
    for (const auto &[a, b] : kTwoRobotEdges)
    {
        expected.insert (std::minmax (a, b));
        expected_vertices.insert (a);
        expected_vertices.insert (b);
    }
    ASSERT_EQ (expected_vertices.size (), 12u);
    ASSERT_EQ (expected.size (), 18u);

    for (const auto &start : expected_vertices)
    {
        std::set<std::string> seen{start};
        std::set<std::pair<std::string, std::string>> edges;
        std::vector<std::string> open{start};
        while (!open.empty ())
        {
            const std::string v = open.back ();
            open.pop_back ();
            for (const auto &n : neighbors (spec, key (SubstructureKind::Permutations, v)))
            {
                const std::string t = to_string (n);
                edges.insert (std::minmax (v, t));
                if (seen.insert (t).second)
                    open.push_back (t);
            }
        }
        EXPECT_EQ (seen, expected_vertices);
        EXPECT_EQ (edges, expected);
    }
}

TEST (Neighbors, FullPuzzleHasNoMoves)
{
    const auto spec = puzzle_spec ();
    EXPECT_TRUE (neighbors (spec, key (SubstructureKind::Pebbles, "[{1},{2},{3},{4},{5},{6},{7},{8},{9}]")).empty ());
    // a single hole in the centre: four robots can slide in
    EXPECT_EQ (neighbors (spec, key (SubstructureKind::Pebbles, "[{1},{2},{3},{4},{},{6},{7},{8},{9}]")).size (), 4u);
}

TEST (Neighbors, CapacityLimitsMoves)
{
    auto spec = chambers_spec ();
    const ECKey k = key (SubstructureKind::Partitions, "[{1,2},{3},{}]");
    EXPECT_EQ (neighbors (spec, k).size (), 6u);
    spec.capacity = {2, 1, 2};
    // nothing may enter B
    EXPECT_EQ (neighbors (spec, k).size (), 3u);
}

TEST (NaturalDistance, ReferenceExamples)
{
    {
        NaturalDistance d (tunnel_spec ());
        const ECKey a = key (SubstructureKind::Permutations, "[(3,4,2,5,6,1),(),()]");
        EXPECT_EQ (d (a, a), 0);
        EXPECT_EQ (d (a, key (SubstructureKind::Permutations, "[(3,4,1,6,5,2),(),()]")), 10);
        EXPECT_EQ (d (a, key (SubstructureKind::Permutations, "[(3,4,2),(1,6,5),()]")), 3);
    }
    {
        NaturalDistance d (chambers_spec ());
        const ECKey start = key (SubstructureKind::Partitions, "[{1,2,3},{4,6,7},{5,8}]");
        EXPECT_EQ (d (key (SubstructureKind::Partitions, "[{1,5,8},{4,6,7},{2,3}]"), start), 4);
    }
    {
        NaturalDistance d (puzzle_spec ());
        // start: robot i in cell 7,4,0,3,5,2,1,6 (i = 1..8), bottom-right cell empty
        const ECKey start = key (SubstructureKind::Pebbles, "[{3},{7},{6},{4},{2},{5},{8},{1},{}]");
        const ECKey other = key (SubstructureKind::Pebbles, "[{4},{3},{6},{},{7},{2},{8},{1},{5}]");
        EXPECT_EQ (d (other, start), 5);
        EXPECT_EQ (d (start, other), 5);
    }
}

TEST (NaturalDistance, PuzzleReachesHalfThePermutations)
{
    NaturalDistance d (puzzle_spec ());
    const auto &layer = d.search_from (key (SubstructureKind::Pebbles, "[{1},{2},{3},{4},{5},{6},{7},{8},{}]"));
    EXPECT_EQ (layer.size (), 181440u);
    // the classic unsolvable swap
    EXPECT_EQ (d (key (SubstructureKind::Pebbles, "[{2},{1},{3},{4},{5},{6},{7},{8},{}]"),
                  key (SubstructureKind::Pebbles, "[{1},{2},{3},{4},{5},{6},{7},{8},{}]")),
               std::nullopt);
}

TEST (NaturalDistance, ChambersKeySpace)
{
    NaturalDistance d (chambers_spec ());
    const auto &layer = d.search_from (key (SubstructureKind::Partitions, "[{1,2,3,4,5},{},{}]"));
    EXPECT_EQ (layer.size (), 243u);
    for (const auto &[code, dist] : layer)
        EXPECT_LE (dist, 5);
    EXPECT_EQ (d (key (SubstructureKind::Partitions, "[{1,2},{3},{}]"), key (SubstructureKind::Partitions, "[{1},{2,3},{}]")), 1);
}

TEST (NaturalDistance, DepthCap)
{
    auto spec = tunnel_spec ();
    spec.depth_cap = 5;
    NaturalDistance d (spec);
    const ECKey a = key (SubstructureKind::Permutations, "[(3,4,2,5,6,1),(),()]");
    EXPECT_EQ (d (a, key (SubstructureKind::Permutations, "[(3,4,1,6,5,2),(),()]")), std::nullopt);
    EXPECT_EQ (d (a, key (SubstructureKind::Permutations, "[(3,4,2),(1,6,5),()]")), 3);
}

TEST (NaturalDistance, MismatchedKeysThrow)
{
    NaturalDistance d (chambers_spec ());
    EXPECT_THROW (d (key (SubstructureKind::Partitions, "[{1},{2},{}]"), key (SubstructureKind::Partitions, "[{1},{2},{3}]")),
                  std::invalid_argument);
    EXPECT_THROW (d (key (SubstructureKind::Partitions, "[{1},{2},{}]"), key (SubstructureKind::Partitions, "[{1},{3},{}]")),
                  std::invalid_argument);
}

// random keys for property checks
ECKey random_key (const SubstructureSpec &spec, std::size_t robots, Rng &rng)
{
    ECKey k{spec.kind, std::vector<std::vector<int>> (spec.regions.size ())};
    std::vector<int> cells (spec.regions.size ());
    std::iota (cells.begin (), cells.end (), 0);
    for (std::size_t r = 0; r < robots; ++r)
    {
        if (spec.kind == SubstructureKind::Pebbles)
        {
            const std::size_t pick = r + rng.below (cells.size () - r);
            std::swap (cells[r], cells[pick]);
            k.groups[static_cast<std::size_t> (cells[r])].push_back (static_cast<int> (r));
        }
        else
            k.groups[rng.below (spec.regions.size ())].push_back (static_cast<int> (r));
    }
    if (spec.kind == SubstructureKind::Permutations)
        for (auto &g : k.groups)
            for (std::size_t i = g.size (); i > 1; --i)
                std::swap (g[i - 1], g[rng.below (i)]);
    k.canonicalize ();
    return k;
}

TEST (NaturalDistance, IsAGraphMetric)
{
    const std::vector<std::pair<SubstructureSpec, std::size_t>> cases{{tunnel_spec (), 4}, {chambers_spec (), 6}, {puzzle_spec (), 3}};
    Rng rng (31);
    for (const auto &[spec, robots] : cases)
    {
        NaturalDistance d (spec);
        for (int trial = 0; trial < 60; ++trial)
        {
            const ECKey a = random_key (spec, robots, rng), b = random_key (spec, robots, rng), c = random_key (spec, robots, rng);
            const auto ab = d (a, b), ba = d (b, a), ac = d (a, c), cb = d (c, b);
            EXPECT_EQ (ab, ba);
            ASSERT_TRUE (ab.has_value ()) << to_string (a) << " " << to_string (b);
            EXPECT_EQ (*ab == 0, a == b);
            if (ac && cb)
            {
                EXPECT_LE (*ab, *ac + *cb);
            }
            for (const auto &n : neighbors (spec, a))
            {
                EXPECT_EQ (d (a, n), 1);
                const auto back = neighbors (spec, n);
                EXPECT_NE (std::find (back.begin (), back.end (), a), back.end ());
            }
        }
    }
}

TEST (Classify, TunnelReferenceConfiguration)
{
    const Workspace w = tunnel ();
    // robots 3, 2, 5, 4 down the upper arm from its far end; 1 and 6 in the left arm
    JointConfig u (6);
    u[2] = at (0, 25);
    u[1] = at (0.3, 19);
    u[4] = at (-0.2, 12);
    u[3] = at (0, 1);
    u[0] = at (-13, 0);
    u[5] = at (-7, 0.4);
    ASSERT_TRUE (joint_free (w, u));
    Rng rng (1);
    EXPECT_EQ (to_string (classify (tunnel_spec (), w, u, rng)), "[(3,2,5,4),(),(1,6)]");

    u[5] = at (40, 0);
    EXPECT_THROW (classify (tunnel_spec (), w, u, rng), ClassificationError);
}

TEST (Classify, ChambersReferenceConfiguration)
{
    const Workspace w = chambers ();
    // {1,5,8} in A, {4,6,7} in B, {2,3} in C; robot 8 straddles the A/C wall but mostly in A
    JointConfig u (8);
    u[0] = at (4, 5);
    u[4] = at (8, 20);
    u[7] = at (14, 8);
    u[3] = at (20, 20);
    u[5] = at (25, 26);
    u[6] = at (16.5, 24);
    u[1] = at (20, 5);
    u[2] = at (26, 10);
    Rng rng (1);
    EXPECT_EQ (to_string (classify (chambers_spec (), w, u, rng)), "[{1,5,8},{4,6,7},{2,3}]");
}

TEST (Classify, PuzzleReferenceConfiguration)
{
    const Workspace w = puzzle ();
    // cell of robot i (1-based) from [{4},{3},{6},{},{7},{2},{8},{1},{5}]
    const int cell[] = {7, 5, 1, 0, 8, 2, 4, 6};
    JointConfig u;
    for (int c : cell)
        u.push_back (Pose{cell_centre (c), 0.0});
    u[6].position = u[6].position + Point2{-1.4, 0.8}; // off-centre but still mostly in its cell
    Rng rng (1);
    EXPECT_EQ (to_string (classify (puzzle_spec (), w, u, rng)), "[{4},{3},{6},{},{7},{2},{8},{1},{5}]");
}

TEST (Classify, PartitionTiesAreRandomAndSeeded)
{
    const Workspace w = chambers ();
    // exactly on the A/B/C corner's vertical wall, between B and C: B and C tie
    const JointConfig u{at (22, 15), at (5, 5)};
    std::map<std::string, int> seen;
    for (std::uint64_t seed = 0; seed < 64; ++seed)
    {
        Rng a (seed), b (seed);
        const ECKey ka = classify (chambers_spec (), w, u, a);
        EXPECT_EQ (ka, classify (chambers_spec (), w, u, b));
        ++seen[to_string (ka)];
    }
    EXPECT_EQ (seen.size (), 2u);
    EXPECT_GT (seen["[{2},{1},{}]"], 0);
    EXPECT_GT (seen["[{2},{},{1}]"], 0);
}

TEST (Classify, PebbleConflictsFavourLargerOverlap)
{
    const Workspace w = puzzle ();
    // both robots lie mostly in the centre cell; robot 2 more so, robot 1 spills into cell 3
    const JointConfig u{at (7.6, 10.5), at (11.8, 10.5)};
    Rng rng (1);
    EXPECT_EQ (to_string (classify (puzzle_spec (), w, u, rng)), "[{},{},{},{1},{2},{},{},{},{}]");
}

TEST (Sample, ConfigurationsAreValid)
{
    const std::vector<std::tuple<SubstructureSpec, Workspace, std::size_t>> cases{
        {tunnel_spec (), tunnel (), 4}, {chambers_spec (), chambers (), 8}, {puzzle_spec (), puzzle (), 8}};
    Rng rng (12);
    for (const auto &[spec, w, robots] : cases)
        for (int trial = 0; trial < 50; ++trial)
        {
            const JointConfig u = sample_configuration (spec, w, robots, rng);
            ASSERT_EQ (u.size (), robots);
            EXPECT_TRUE (joint_free (w, u));
            const ECKey k = classify (spec, w, u, rng);
            EXPECT_EQ (k.robot_count (), robots);
        }
}

TEST (Sample, TwoRobotTunnelCoversEveryClass)
{
    const Workspace w = tunnel ();
    const auto spec = tunnel_spec ();
    Rng rng (77);
    std::set<std::string> seen;
    for (int i = 0; i < 10000; ++i)
        seen.insert (to_string (classify (spec, w, sample_configuration (spec, w, 2, rng), rng)));
    std::set<std::string> expected;
    for (const auto &[a, b] : kTwoRobotEdges)
    {
        expected.insert (a);
        expected.insert (b);
    }
    EXPECT_EQ (seen, expected);
}

TEST (Sample, ImpossibleRequestThrows)
{
    // nine radius-2 discs cannot fit in a 5-wide, 10-long box
    const Workspace w (Polygon ({{0, 0}, {10, 0}, {10, 5}, {0, 5}}), {}, RobotShape{2.0, {}});
    SubstructureSpec spec;
    spec.kind = SubstructureKind::Partitions;
    spec.regions = {{"all", {0, 0, 10, 5}}};
    Rng rng (1);
    EXPECT_THROW (sample_configuration (spec, w, 9, rng, 200), SamplingError);
}

} // namespace
} // namespace mrmp
