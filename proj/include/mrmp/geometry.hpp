#pragma once
/**
 * @file
 * @brief Planar workspace, robot footprints and straight-line local planning
 *        in the joint configuration space of m robots.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrmp
{
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;

        friend Point2 operator+ (Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
        friend Point2 operator- (Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
        friend Point2 operator* (double k, Point2 a) { return {k * a.x, k * a.y}; }
        friend bool operator== (const Point2 &, const Point2 &) = default;
    };

    inline double dot (Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
    inline double cross (Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
    inline double norm (Point2 a) { return std::hypot (a.x, a.y); }

    /// Wraps an angle into [-pi, pi).
    inline double normalize_angle (double theta)
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double t = std::fmod (theta + std::numbers::pi, two_pi);
        if (t < 0.0)
            t += two_pi;
        t -= std::numbers::pi;
        return t >= std::numbers::pi ? -std::numbers::pi : t;
    }

    struct Pose
    {
        Point2 position;
        double theta = 0.0; ///< radians in [-pi, pi)

        friend bool operator== (const Pose &, const Pose &) = default;
    };

    /// Joint configuration: index i is always robot r_i.
    using JointConfig = std::vector<Pose>;

    struct Segment
    {
        JointConfig a;
        JointConfig b;
    };

    struct Rect
    {
        double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

        bool contains (Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
        double area () const { return (x1 - x0) * (y1 - y0); }
        friend bool operator== (const Rect &, const Rect &) = default;
    };

    // ---------------------------------------------------------------------
    // Polygon primitives
    // ---------------------------------------------------------------------

    inline double segment_distance (Point2 p, Point2 a, Point2 b)
    {
        const Point2 ab = b - a;
        const double len2 = dot (ab, ab);
        double t = len2 > 0.0 ? dot (p - a, ab) / len2 : 0.0;
        t = std::clamp (t, 0.0, 1.0);
        return norm (p - (a + t * ab));
    }

    inline int orientation (Point2 a, Point2 b, Point2 c)
    {
        const double v = cross (b - a, c - a);
        return (v > 0.0) - (v < 0.0);
    }

    inline bool on_segment (Point2 a, Point2 b, Point2 p)
    {
        return std::min (a.x, b.x) <= p.x && p.x <= std::max (a.x, b.x) && std::min (a.y, b.y) <= p.y && p.y <= std::max (a.y, b.y);
    }

    /// Closed segment intersection; touching counts.
    inline bool segments_intersect (Point2 a, Point2 b, Point2 c, Point2 d)
    {
        const int o1 = orientation (a, b, c), o2 = orientation (a, b, d);
        const int o3 = orientation (c, d, a), o4 = orientation (c, d, b);
        if (o1 != o2 && o3 != o4)
            return true;
        return (o1 == 0 && on_segment (a, b, c)) || (o2 == 0 && on_segment (a, b, d)) || (o3 == 0 && on_segment (c, d, a)) ||
               (o4 == 0 && on_segment (c, d, b));
    }

    class Polygon
    {
      public:
        Polygon () = default;
        explicit Polygon (std::vector<Point2> vertices) : vertices_ (std::move (vertices)) {}

        const std::vector<Point2> &vertices () const { return vertices_; }
        std::size_t size () const { return vertices_.size (); }
        Point2 vertex (std::size_t i) const { return vertices_[i % vertices_.size ()]; }

        double signed_area () const
        {
            double a = 0.0;
            for (std::size_t i = 0; i < size (); ++i)
                a += cross (vertex (i), vertex (i + 1));
            return 0.5 * a;
        }

        /// Winding number of the polygon around p (0 means outside).
        int winding_number (Point2 p) const
        {
            int wn = 0;
            for (std::size_t i = 0; i < size (); ++i)
            {
                const Point2 a = vertex (i), b = vertex (i + 1);
                if (a.y <= p.y)
                {
                    if (b.y > p.y && cross (b - a, p - a) > 0.0)
                        ++wn;
                }
                else if (b.y <= p.y && cross (b - a, p - a) < 0.0)
                    --wn;
            }
            return wn;
        }

        bool contains (Point2 p) const { return winding_number (p) != 0; }

        double boundary_distance (Point2 p) const
        {
            double best = std::numeric_limits<double>::infinity ();
            for (std::size_t i = 0; i < size (); ++i)
                best = std::min (best, segment_distance (p, vertex (i), vertex (i + 1)));
            return best;
        }

        bool edges_intersect (const Polygon &other) const
        {
            for (std::size_t i = 0; i < size (); ++i)
                for (std::size_t j = 0; j < other.size (); ++j)
                    if (segments_intersect (vertex (i), vertex (i + 1), other.vertex (j), other.vertex (j + 1)))
                        return true;
            return false;
        }

        /// True when two non-adjacent edges meet.
        bool self_intersecting () const
        {
            const std::size_t n = size ();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                {
                    if (j == i + 1 || (i == 0 && j == n - 1))
                        continue;
                    if (segments_intersect (vertex (i), vertex (i + 1), vertex (j), vertex (j + 1)))
                        return true;
                }
            return false;
        }

        Rect bounds () const
        {
            Rect r{std::numeric_limits<double>::infinity (), std::numeric_limits<double>::infinity (),
                   -std::numeric_limits<double>::infinity (), -std::numeric_limits<double>::infinity ()};
            for (const auto &v : vertices_)
            {
                r.x0 = std::min (r.x0, v.x);
                r.y0 = std::min (r.y0, v.y);
                r.x1 = std::max (r.x1, v.x);
                r.y1 = std::max (r.y1, v.y);
            }
            return r;
        }

        friend bool operator== (const Polygon &, const Polygon &) = default;

      private:
        std::vector<Point2> vertices_;
    };

    /// Footprints overlap or touch.
    inline bool polygons_intersect (const Polygon &a, const Polygon &b)
    {
        if (a.edges_intersect (b))
            return true;
        return (b.size () > 0 && a.contains (b.vertex (0))) || (a.size () > 0 && b.contains (a.vertex (0)));
    }

    /// Exact area of the disc (c, r) intersected with an axis-aligned rectangle.
    inline double disc_rect_intersection_area (Point2 c, double r, const Rect &rect)
    {
        const double x0 = std::max (rect.x0 - c.x, -r), x1 = std::min (rect.x1 - c.x, r);
        const double y0 = rect.y0 - c.y, y1 = rect.y1 - c.y;
        if (x0 >= x1 || y0 >= y1 || r <= 0.0)
            return 0.0;

        const double r2 = r * r;
        auto half_chord = [&] (double x) { return std::sqrt (std::max (0.0, r2 - x * x)); };
        // antiderivative of half_chord
        auto chord_integral = [&] (double x) {
            const double xs = std::clamp (x / r, -1.0, 1.0);
            return 0.5 * (x * half_chord (x) + r2 * std::asin (xs));
        };

        std::vector<double> cuts{x0, x1};
        for (double y : {y0, y1})
            if (std::abs (y) < r)
            {
                const double k = std::sqrt (r2 - y * y);
                for (double x : {-k, k})
                    if (x > x0 && x < x1)
                        cuts.push_back (x);
            }
        std::sort (cuts.begin (), cuts.end ());

        double area = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size (); ++i)
        {
            const double a = cuts[i], b = cuts[i + 1];
            if (b <= a)
                continue;
            const double h = half_chord (0.5 * (a + b));
            const bool top_is_chord = h < y1, bottom_is_chord = -h > y0;
            const double top = top_is_chord ? h : y1, bottom = bottom_is_chord ? -h : y0;
            if (top <= bottom)
                continue;
            const double upper = top_is_chord ? chord_integral (b) - chord_integral (a) : y1 * (b - a);
            const double lower = bottom_is_chord ? -(chord_integral (b) - chord_integral (a)) : y0 * (b - a);
            area += upper - lower;
        }
        return std::max (0.0, area);
    }

    // ---------------------------------------------------------------------
    // Robots and workspace
    // ---------------------------------------------------------------------

    /// A disc of `radius`, or a polygon outline in the robot frame (then
    /// `radius` is the bounding radius of the outline around the origin).
    struct RobotShape
    {
        double radius = 1.0;
        std::vector<Point2> outline;

        bool is_disc () const { return outline.empty (); }
        friend bool operator== (const RobotShape &, const RobotShape &) = default;
    };

    inline Polygon place (const RobotShape &shape, const Pose &p)
    {
        const double c = std::cos (p.theta), s = std::sin (p.theta);
        std::vector<Point2> out;
        out.reserve (shape.outline.size ());
        for (const auto &v : shape.outline)
            out.push_back ({p.position.x + c * v.x - s * v.y, p.position.y + s * v.x + c * v.y});
        return Polygon (std::move (out));
    }

    class Workspace
    {
      public:
        Workspace () = default;

        /// Throws std::invalid_argument when the geometry is malformed.
        Workspace (Polygon boundary, std::vector<Polygon> obstacles, RobotShape robot)
            : boundary_ (std::move (boundary)), obstacles_ (std::move (obstacles)), robot_ (std::move (robot))
        {
            if (boundary_.size () < 3)
                throw std::invalid_argument ("boundary: needs at least 3 vertices");
            if (boundary_.signed_area () <= 0.0)
                throw std::invalid_argument ("boundary: vertices must be counter-clockwise");
            if (boundary_.self_intersecting ())
                throw std::invalid_argument ("boundary: polygon self-intersects");
            for (std::size_t i = 0; i < obstacles_.size (); ++i)
            {
                const auto &o = obstacles_[i];
                const std::string field = "obstacles[" + std::to_string (i) + "]";
                if (o.size () < 3)
                    throw std::invalid_argument (field + ": needs at least 3 vertices");
                if (o.signed_area () >= 0.0)
                    throw std::invalid_argument (field + ": vertices must be clockwise");
                if (o.self_intersecting ())
                    throw std::invalid_argument (field + ": polygon self-intersects");
                for (const auto &v : o.vertices ())
                    if (!boundary_.contains (v) && boundary_.boundary_distance (v) > 1e-9)
                        throw std::invalid_argument (field + ": not contained in boundary");
            }
            if (!(robot_.radius > 0.0) || !std::isfinite (robot_.radius))
                throw std::invalid_argument ("robot.radius: must be positive");
            if (!robot_.is_disc () && robot_.outline.size () < 3)
                throw std::invalid_argument ("robot.outline: needs at least 3 vertices");
            bounds_ = boundary_.bounds ();
        }

        const Polygon &boundary () const { return boundary_; }
        const std::vector<Polygon> &obstacles () const { return obstacles_; }
        const RobotShape &robot () const { return robot_; }
        double robot_radius () const { return robot_.radius; }
        const Rect &bounds () const { return bounds_; }
        bool rotating () const { return !robot_.is_disc (); }

        friend bool operator== (const Workspace &a, const Workspace &b)
        {
            return a.boundary_ == b.boundary_ && a.obstacles_ == b.obstacles_ && a.robot_ == b.robot_;
        }

      private:
        Polygon boundary_;
        std::vector<Polygon> obstacles_;
        RobotShape robot_;
        Rect bounds_;
    };

    inline bool finite (const Pose &p)
    {
        return std::isfinite (p.position.x) && std::isfinite (p.position.y) && std::isfinite (p.theta);
    }

    /// Boundary or obstacle contact counts as collision.
    inline bool robot_free (const Workspace &w, const Pose &p)
    {
        if (!finite (p))
            return false;
        const double r = w.robot_radius ();
        if (w.robot ().is_disc ())
        {
            const Point2 c = p.position;
            if (!w.boundary ().contains (c) || w.boundary ().boundary_distance (c) <= r)
                return false;
            for (const auto &o : w.obstacles ())
                if (o.contains (c) || o.boundary_distance (c) <= r)
                    return false;
            return true;
        }

        const Polygon body = place (w.robot (), p);
        for (const auto &v : body.vertices ())
            if (!w.boundary ().contains (v))
                return false;
        if (body.edges_intersect (w.boundary ()))
            return false;
        for (const auto &o : w.obstacles ())
        {
            // cheap reject on the bounding disc
            if (!o.contains (p.position) && o.boundary_distance (p.position) > r)
                continue;
            if (polygons_intersect (body, o))
                return false;
        }
        return true;
    }

    /// Footprints strictly disjoint; tangency is a collision.
    inline bool pair_free (const Workspace &w, const Pose &p, const Pose &q)
    {
        const double d = norm (p.position - q.position);
        if (w.robot ().is_disc ())
            return d > 2.0 * w.robot_radius ();
        if (d > 2.0 * w.robot_radius ())
            return true;
        return !polygons_intersect (place (w.robot (), p), place (w.robot (), q));
    }

    inline bool joint_free (const Workspace &w, std::span<const Pose> u)
    {
        for (const auto &p : u)
            if (!robot_free (w, p))
                return false;
        for (std::size_t i = 0; i < u.size (); ++i)
            for (std::size_t j = i + 1; j < u.size (); ++j)
                if (!pair_free (w, u[i], u[j]))
                    return false;
        return true;
    }

    inline Pose interpolate (const Pose &a, const Pose &b, double t)
    {
        const double dtheta = normalize_angle (b.theta - a.theta);
        return {a.position + t * (b.position - a.position), normalize_angle (a.theta + t * dtheta)};
    }

    /// Per-robot straight line in position, shortest arc in orientation.
    inline JointConfig interpolate (std::span<const Pose> a, std::span<const Pose> b, double t)
    {
        if (a.size () != b.size ())
            throw std::invalid_argument ("interpolate: configurations differ in robot count");
        if (!(t >= 0.0 && t <= 1.0))
            throw std::invalid_argument ("interpolate: t must lie in [0, 1]");
        JointConfig out (a.size ());
        for (std::size_t i = 0; i < a.size (); ++i)
            out[i] = t == 0.0 ? a[i] : t == 1.0 ? b[i] : interpolate (a[i], b[i], t);
        return out;
    }

    /// Distance swept by the robot's footprint, bounded by position change plus
    /// arc length of the farthest outline point.
    inline double sweep_length (const Workspace &w, const Pose &a, const Pose &b)
    {
        double d = norm (b.position - a.position);
        if (w.rotating ())
            d += std::abs (normalize_angle (b.theta - a.theta)) * w.robot_radius ();
        return d;
    }

    /// Number of interpolation steps for a motion: the smallest power of two
    /// keeping every robot's per-step sweep within `resolution`. Powers of two
    /// make the sample set at resolution/2 a superset of the one at resolution.
    inline std::size_t edge_steps (const Workspace &w, std::span<const Pose> a, std::span<const Pose> b, double resolution)
    {
        double longest = 0.0;
        for (std::size_t i = 0; i < a.size (); ++i)
            longest = std::max (longest, sweep_length (w, a[i], b[i]));
        std::size_t steps = 1;
        while (static_cast<double> (steps) * resolution < longest)
            steps *= 2;
        return steps;
    }

    inline bool edge_free (const Workspace &w, std::span<const Pose> a, std::span<const Pose> b, double resolution)
    {
        if (!(resolution > 0.0))
            throw std::invalid_argument ("edge_free: resolution must be positive");
        if (a.size () != b.size ())
            throw std::invalid_argument ("edge_free: configurations differ in robot count");

        // orient canonically so the check is symmetric bit for bit
        if (std::lexicographical_compare (b.begin (), b.end (), a.begin (), a.end (), [] (const Pose &p, const Pose &q) {
                if (p.position.x != q.position.x)
                    return p.position.x < q.position.x;
                if (p.position.y != q.position.y)
                    return p.position.y < q.position.y;
                return p.theta < q.theta;
            }))
            std::swap (a, b);

        if (!joint_free (w, a) || !joint_free (w, b))
            return false;
        const std::size_t steps = edge_steps (w, a, b, resolution);
        JointConfig mid (a.size ());
        for (std::size_t k = 1; k < steps; ++k)
        {
            const double t = static_cast<double> (k) / static_cast<double> (steps);
            for (std::size_t i = 0; i < a.size (); ++i)
                mid[i] = interpolate (a[i], b[i], t);
            if (!joint_free (w, mid))
                return false;
        }
        return true;
    }

    inline bool edge_free (const Workspace &w, const Segment &s, double resolution) { return edge_free (w, s.a, s.b, resolution); }

} // namespace mrmp
