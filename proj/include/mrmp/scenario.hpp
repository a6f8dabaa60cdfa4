#pragma once
/**
 * @file
 * @brief Scenario files: workspace, robots, start/goal, optional substructure
 *        and planner defaults, stored as JSON.
 *
 * Lengths are workspace units, angles radians. Polygons are lists of [x, y]
 * pairs (boundary counter-clockwise, obstacles clockwise); poses are [x, y]
 * or [x, y, theta]. See README.md for the full schema.
 */

#include "mrmp/errors.hpp"
#include "mrmp/geometry.hpp"
#include "mrmp/planner.hpp"
#include "mrmp/substructures.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mrmp
{
    struct Scenario
    {
        std::string name;
        std::string notes; ///< free text kept verbatim (dimension choices etc.)
        Workspace workspace;
        JointConfig start, goal;
        std::optional<SubstructureSpec> substructure;
        PlannerConfig planner; ///< defaults for commands that plan here
        std::vector<std::vector<std::size_t>> robot_subsets; ///< smaller variants, 1-based robot labels

        std::size_t robots () const { return start.size (); }
    };

    namespace detail
    {
        using nlohmann::json;

        inline const json &need (const json &j, const char *key, const std::string &field)
        {
            if (!j.is_object () || !j.contains (key))
                throw ScenarioError (field.empty () ? key : field + "." + key, "missing");
            return j.at (key);
        }

        inline double number (const json &j, const std::string &field)
        {
            if (!j.is_number ())
                throw ScenarioError (field, "expected a number");
            const double v = j.get<double> ();
            if (!std::isfinite (v))
                throw ScenarioError (field, "must be finite");
            return v;
        }

        inline std::size_t count (const json &j, const std::string &field)
        {
            if (!j.is_number_integer () || j.get<long long> () < 0)
                throw ScenarioError (field, "expected a non-negative integer");
            return j.get<std::size_t> ();
        }

        inline Point2 point (const json &j, const std::string &field)
        {
            if (!j.is_array () || j.size () != 2)
                throw ScenarioError (field, "expected [x, y]");
            return {number (j[0], field + "[0]"), number (j[1], field + "[1]")};
        }

        inline Polygon polygon (const json &j, const std::string &field)
        {
            if (!j.is_array ())
                throw ScenarioError (field, "expected a list of [x, y] vertices");
            std::vector<Point2> v;
            for (std::size_t i = 0; i < j.size (); ++i)
                v.push_back (point (j[i], field + "[" + std::to_string (i) + "]"));
            return Polygon (std::move (v));
        }

        inline Pose pose (const json &j, const std::string &field)
        {
            if (!j.is_array () || (j.size () != 2 && j.size () != 3))
                throw ScenarioError (field, "expected [x, y] or [x, y, theta]");
            Pose p{{number (j[0], field + "[0]"), number (j[1], field + "[1]")}, 0.0};
            if (j.size () == 3)
                p.theta = normalize_angle (number (j[2], field + "[2]"));
            return p;
        }

        inline JointConfig config (const json &j, const std::string &field)
        {
            if (!j.is_array () || j.empty ())
                throw ScenarioError (field, "expected a non-empty list of poses");
            JointConfig c;
            for (std::size_t i = 0; i < j.size (); ++i)
                c.push_back (pose (j[i], field + "[" + std::to_string (i) + "]"));
            return c;
        }

        inline json to_json (Point2 p) { return json::array ({p.x, p.y}); }

        inline json to_json (const Polygon &poly)
        {
            json out = json::array ();
            for (const auto &v : poly.vertices ())
                out.push_back (to_json (v));
            return out;
        }

        inline json to_json (const JointConfig &c, bool rotating)
        {
            json out = json::array ();
            for (const auto &p : c)
                out.push_back (rotating ? json::array ({p.position.x, p.position.y, p.theta}) : json::array ({p.position.x, p.position.y}));
            return out;
        }

        inline SubstructureSpec substructure (const json &j)
        {
            const std::string f = "substructure";
            SubstructureSpec s;
            try
            {
                s.kind = parse_substructure_kind (need (j, "kind", f).get<std::string> ());
            }
            catch (const std::exception &e)
            {
                throw ScenarioError (f + ".kind", e.what ());
            }
            const json &regions = need (j, "regions", f);
            if (!regions.is_array ())
                throw ScenarioError (f + ".regions", "expected a list");
            for (std::size_t i = 0; i < regions.size (); ++i)
            {
                const std::string rf = f + ".regions[" + std::to_string (i) + "]";
                const json &r = regions[i];
                Region reg;
                reg.name = r.value ("name", std::string{});
                const json &rect = need (r, "rect", rf);
                if (!rect.is_array () || rect.size () != 4)
                    throw ScenarioError (rf + ".rect", "expected [x0, y0, x1, y1]");
                reg.rect = {number (rect[0], rf + ".rect"), number (rect[1], rf + ".rect"), number (rect[2], rf + ".rect"),
                            number (rect[3], rf + ".rect")};
                const std::string axis = r.value ("axis", std::string ("x"));
                reg.axis = axis.size () == 1 ? axis[0] : '?';
                const std::string order = r.value ("order", std::string ("increasing"));
                reg.direction = order == "increasing" ? 1 : order == "decreasing" ? -1 : 0;
                s.regions.push_back (reg);
            }
            if (j.contains ("adjacency"))
                for (const auto &e : j.at ("adjacency"))
                {
                    if (!e.is_array () || e.size () != 2 || !e[0].is_number_integer () || !e[1].is_number_integer ())
                        throw ScenarioError (f + ".adjacency", "expected [i, j] index pairs");
                    s.adjacency.emplace_back (e[0].get<int> (), e[1].get<int> ());
                }
            if (j.contains ("capacity"))
                for (const auto &c : j.at ("capacity"))
                {
                    if (!c.is_number_integer ())
                        throw ScenarioError (f + ".capacity", "expected integers");
                    s.capacity.push_back (c.get<int> ());
                }
            if (j.contains ("depth_cap"))
            {
                if (!j.at ("depth_cap").is_number_integer () || j.at ("depth_cap").get<int> () < -1)
                    throw ScenarioError (f + ".depth_cap", "expected an integer >= -1");
                s.depth_cap = j.at ("depth_cap").get<int> ();
            }
            if (j.contains ("tau"))
                s.tau = static_cast<int> (count (j.at ("tau"), f + ".tau"));
            return s;
        }

        inline json to_json (const SubstructureSpec &s)
        {
            json regions = json::array ();
            for (const auto &r : s.regions)
                regions.push_back ({{"name", r.name},
                                    {"rect", json::array ({r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1})},
                                    {"axis", std::string (1, r.axis)},
                                    {"order", r.direction > 0 ? "increasing" : "decreasing"}});
            json out{{"kind", std::string (to_string (s.kind))}, {"regions", regions}, {"depth_cap", s.depth_cap}, {"tau", s.tau}};
            if (!s.adjacency.empty ())
            {
                json adj = json::array ();
                for (auto [a, b] : s.adjacency)
                    adj.push_back (json::array ({a, b}));
                out["adjacency"] = adj;
            }
            if (!s.capacity.empty ())
                out["capacity"] = s.capacity;
            return out;
        }

        inline void planner_overrides (const json &j, PlannerConfig &cfg)
        {
            const std::string f = "planner";
            if (!j.is_object ())
                throw ScenarioError (f, "expected an object");
            for (auto it = j.begin (); it != j.end (); ++it)
            {
                const std::string &k = it.key ();
                const std::string kf = f + "." + k;
                if (k == "roadmap_size")
                    cfg.roadmap_size = count (*it, kf);
                else if (k == "roadmap_k")
                    cfg.roadmap_k = count (*it, kf);
                else if (k == "roadmap_retries")
                    cfg.roadmap_retries = count (*it, kf);
                else if (k == "max_vertices")
                    cfg.max_vertices = count (*it, kf);
                else if (k == "max_iterations")
                    cfg.max_iterations = count (*it, kf);
                else if (k == "goal_bias")
                    cfg.goal_bias = number (*it, kf);
                else if (k == "resolution")
                    cfg.resolution = number (*it, kf);
                else
                    throw ScenarioError (kf, "unknown planner setting");
            }
            try
            {
                cfg.validate ();
            }
            catch (const std::invalid_argument &e)
            {
                throw ScenarioError (f, e.what ());
            }
        }

        inline json to_json (const PlannerConfig &c)
        {
            return {{"roadmap_size", c.roadmap_size}, {"roadmap_k", c.roadmap_k},   {"roadmap_retries", c.roadmap_retries},
                    {"max_vertices", c.max_vertices}, {"max_iterations", c.max_iterations}, {"goal_bias", c.goal_bias},
                    {"resolution", c.resolution}};
        }

        inline bool inside_or_on (const Polygon &poly, Point2 p) { return poly.contains (p) || poly.boundary_distance (p) <= 1e-9; }
    } // namespace detail

    /// Checks every cross-field invariant; throws ScenarioError.
    inline void validate (const Scenario &s)
    {
        if (s.start.size () != s.goal.size ())
            throw ScenarioError ("goal", "has " + std::to_string (s.goal.size ()) + " poses, start has " + std::to_string (s.start.size ()));
        if (s.start.empty ())
            throw ScenarioError ("start", "no robots");
        for (const auto &[field, c] : {std::pair<const char *, const JointConfig *>{"start", &s.start}, {"goal", &s.goal}})
        {
            for (std::size_t i = 0; i < c->size (); ++i)
                if (!robot_free (s.workspace, (*c)[i]))
                    throw ScenarioError (std::string (field) + "[" + std::to_string (i) + "]", "robot collides with the workspace");
            for (std::size_t i = 0; i < c->size (); ++i)
                for (std::size_t j = i + 1; j < c->size (); ++j)
                    if (!pair_free (s.workspace, (*c)[i], (*c)[j]))
                        throw ScenarioError (std::string (field), "robots " + std::to_string (i + 1) + " and " + std::to_string (j + 1) + " collide");
        }
        if (s.substructure)
        {
            s.substructure->validate (s.robots ());
            for (std::size_t i = 0; i < s.substructure->regions.size (); ++i)
            {
                const Rect &r = s.substructure->regions[i].rect;
                for (Point2 p : {Point2{r.x0, r.y0}, Point2{r.x1, r.y0}, Point2{r.x1, r.y1}, Point2{r.x0, r.y1}})
                    if (!detail::inside_or_on (s.workspace.boundary (), p))
                        throw ScenarioError ("substructure.regions[" + std::to_string (i) + "].rect", "extends outside the workspace");
            }
        }
        for (std::size_t k = 0; k < s.robot_subsets.size (); ++k)
        {
            const std::string f = "robot_subsets[" + std::to_string (k) + "]";
            const auto &sub = s.robot_subsets[k];
            if (sub.empty ())
                throw ScenarioError (f, "empty subset");
            for (std::size_t i = 0; i < sub.size (); ++i)
            {
                if (sub[i] == 0 || sub[i] > s.robots ())
                    throw ScenarioError (f, "robot label " + std::to_string (sub[i]) + " out of range");
                for (std::size_t j = 0; j < i; ++j)
                    if (sub[j] == sub[i])
                        throw ScenarioError (f, "robot label " + std::to_string (sub[i]) + " repeated");
            }
            for (std::size_t j = 0; j < k; ++j)
                if (s.robot_subsets[j].size () == sub.size ())
                    throw ScenarioError (f, "two subsets of the same size");
        }
    }

    inline Scenario scenario_from_json (const nlohmann::json &j)
    {
        using namespace detail;
        if (!j.is_object ())
            throw ScenarioError ("(root)", "expected a JSON object");
        Scenario s;
        s.name = j.value ("name", std::string{});
        s.notes = j.value ("notes", std::string{});

        const json &ws = need (j, "workspace", "");
        Polygon boundary = polygon (need (ws, "boundary", "workspace"), "workspace.boundary");
        std::vector<Polygon> obstacles;
        if (ws.contains ("obstacles"))
        {
            const json &obs = ws.at ("obstacles");
            if (!obs.is_array ())
                throw ScenarioError ("workspace.obstacles", "expected a list of polygons");
            for (std::size_t i = 0; i < obs.size (); ++i)
                obstacles.push_back (polygon (obs[i], "workspace.obstacles[" + std::to_string (i) + "]"));
        }

        const json &rj = need (j, "robot", "");
        RobotShape shape;
        if (rj.contains ("outline"))
        {
            shape.outline = polygon (rj.at ("outline"), "robot.outline").vertices ();
            shape.radius = 0.0;
            for (const auto &v : shape.outline)
                shape.radius = std::max (shape.radius, norm (v));
        }
        else
            shape.radius = number (need (rj, "radius", "robot"), "robot.radius");

        try
        {
            s.workspace = Workspace (std::move (boundary), std::move (obstacles), std::move (shape));
        }
        catch (const std::invalid_argument &e)
        {
            // messages start with the offending field
            const std::string what = e.what ();
            const auto colon = what.find (':');
            throw ScenarioError (colon == std::string::npos ? "workspace" : (what.rfind ("robot", 0) == 0 ? "" : "workspace.") + what.substr (0, colon),
                                 colon == std::string::npos ? what : what.substr (colon + 2));
        }

        s.start = config (need (j, "start", ""), "start");
        s.goal = config (need (j, "goal", ""), "goal");
        if (j.contains ("substructure") && !j.at ("substructure").is_null ())
            s.substructure = substructure (j.at ("substructure"));
        if (j.contains ("planner"))
            planner_overrides (j.at ("planner"), s.planner);
        if (j.contains ("robot_subsets"))
        {
            const json &subs = j.at ("robot_subsets");
            if (!subs.is_array ())
                throw ScenarioError ("robot_subsets", "expected a list of robot label lists");
            for (std::size_t k = 0; k < subs.size (); ++k)
            {
                const std::string f = "robot_subsets[" + std::to_string (k) + "]";
                if (!subs[k].is_array ())
                    throw ScenarioError (f, "expected a list of 1-based robot labels");
                std::vector<std::size_t> sub;
                for (const auto &label : subs[k])
                    sub.push_back (count (label, f));
                s.robot_subsets.push_back (std::move (sub));
            }
        }
        validate (s);
        return s;
    }

    inline nlohmann::json to_json (const Scenario &s)
    {
        using namespace detail;
        json obstacles = json::array ();
        for (const auto &o : s.workspace.obstacles ())
            obstacles.push_back (detail::to_json (o));
        json robot;
        if (s.workspace.robot ().is_disc ())
            robot = {{"radius", s.workspace.robot_radius ()}};
        else
            robot = {{"outline", detail::to_json (Polygon (s.workspace.robot ().outline))}};
        const bool rot = s.workspace.rotating ();
        json out{{"name", s.name},
                 {"notes", s.notes},
                 {"workspace", {{"boundary", detail::to_json (s.workspace.boundary ())}, {"obstacles", obstacles}}},
                 {"robot", robot},
                 {"start", detail::to_json (s.start, rot)},
                 {"goal", detail::to_json (s.goal, rot)},
                 {"planner", detail::to_json (s.planner)}};
        if (s.substructure)
            out["substructure"] = detail::to_json (*s.substructure);
        if (!s.robot_subsets.empty ())
            out["robot_subsets"] = s.robot_subsets;
        return out;
    }

    inline Scenario parse_scenario (const std::string &text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse (text, nullptr, true, /*ignore_comments=*/true);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ScenarioError ("(file)", std::string ("JSON parse error: ") + e.what ());
        }
        return scenario_from_json (j);
    }

    inline Scenario load_scenario (const std::string &path)
    {
        std::ifstream in (path);
        if (!in)
            throw ScenarioError ("(file)", "cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf ();
        return parse_scenario (buf.str ());
    }

    inline std::string serialize (const Scenario &s) { return to_json (s).dump (2) + "\n"; }

    /// Keeps the listed robots (1-based labels), renumbered in list order.
    inline Scenario with_robot_labels (Scenario s, const std::vector<std::size_t> &labels)
    {
        JointConfig start, goal;
        for (auto l : labels)
        {
            if (l == 0 || l > s.robots ())
                throw ScenarioError ("robots", "robot label " + std::to_string (l) + " out of range 1.." + std::to_string (s.robots ()));
            start.push_back (s.start[l - 1]);
            goal.push_back (s.goal[l - 1]);
        }
        s.start = std::move (start);
        s.goal = std::move (goal);
        s.robot_subsets.clear ();
        return s;
    }

    /// The scenario's declared subset of n robots, or else its first n robots.
    inline Scenario with_robots (Scenario s, std::size_t n)
    {
        if (n == 0 || n > s.robots ())
            throw ScenarioError ("robots", "subset size " + std::to_string (n) + " out of range 1.." + std::to_string (s.robots ()));
        for (const auto &sub : s.robot_subsets)
            if (sub.size () == n)
                return with_robot_labels (std::move (s), sub);
        std::vector<std::size_t> first (n);
        for (std::size_t i = 0; i < n; ++i)
            first[i] = i + 1;
        return with_robot_labels (std::move (s), first);
    }

    inline bool operator== (const SubstructureSpec &a, const SubstructureSpec &b)
    {
        return a.kind == b.kind && a.regions == b.regions && a.adjacency == b.adjacency && a.capacity == b.capacity && a.depth_cap == b.depth_cap &&
               a.tau == b.tau;
    }

    inline bool same_planner_defaults (const PlannerConfig &a, const PlannerConfig &b)
    {
        return a.roadmap_size == b.roadmap_size && a.roadmap_k == b.roadmap_k && a.roadmap_retries == b.roadmap_retries &&
               a.max_vertices == b.max_vertices && a.max_iterations == b.max_iterations && a.goal_bias == b.goal_bias && a.resolution == b.resolution;
    }

    inline bool operator== (const Scenario &a, const Scenario &b)
    {
        return a.name == b.name && a.notes == b.notes && a.workspace == b.workspace && a.start == b.start && a.goal == b.goal &&
               a.substructure == b.substructure && same_planner_defaults (a.planner, b.planner) && a.robot_subsets == b.robot_subsets;
    }

} // namespace mrmp
