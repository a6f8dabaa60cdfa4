#pragma once
/**
 * @file
 * @brief Distances between joint configurations of m robots.
 *
 * Every metric works on per-robot displacements v_i - u_i. With a rotation
 * weight s in [0, 1] each displacement becomes the scaled triple
 * (s x_i, s y_i, (1 - s) theta_i), theta_i being the wrapped absolute angular
 * difference; s = 1 is pure translation.
 *
 *  - SumL2 / MaxL2: sum / maximum of per-robot lengths.
 *  - Eps2 / EpsInf: smallest common translation tolerance under L2 / Linf,
 *    i.e. the radius of the smallest enclosing ball / half the side of the
 *    smallest enclosing axis-aligned cube of the displacement points.
 *  - Ctd: sum of squared distances of the displacements to their centroid
 *    (squared length units, not square-rooted).
 */

#include "mrmp/geometry.hpp"
#include "mrmp/miniball.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mrmp
{
    enum class MetricKind
    {
        SumL2,
        MaxL2,
        Eps2,
        EpsInf,
        Ctd
    };

    inline constexpr std::array<MetricKind, 5> all_metric_kinds{MetricKind::SumL2, MetricKind::MaxL2, MetricKind::Eps2, MetricKind::EpsInf,
                                                               MetricKind::Ctd};

    inline std::string_view to_string (MetricKind k)
    {
        switch (k)
        {
        case MetricKind::SumL2:
            return "sum_l2";
        case MetricKind::MaxL2:
            return "max_l2";
        case MetricKind::Eps2:
            return "eps2";
        case MetricKind::EpsInf:
            return "epsinf";
        case MetricKind::Ctd:
            return "ctd";
        }
        return "?";
    }

    inline MetricKind parse_metric_kind (std::string_view name)
    {
        for (auto k : all_metric_kinds)
            if (to_string (k) == name)
                return k;
        throw std::invalid_argument ("unknown metric '" + std::string (name) + "' (expected sum_l2, max_l2, eps2, epsinf or ctd)");
    }

    struct Metric
    {
        MetricKind kind = MetricKind::SumL2;
        double s = 1.0; ///< translation weight; 1 - s weighs rotation

        Metric () = default;
        Metric (MetricKind k, double weight = 1.0) : kind (k), s (weight)
        {
            if (!(weight >= 0.0 && weight <= 1.0))
                throw std::invalid_argument ("metric weight s must lie in [0, 1]");
        }

        friend bool operator== (const Metric &, const Metric &) = default;
    };

    /// "eps2" or "eps2@0.7" when s != 1.
    inline std::string label (const Metric &m)
    {
        std::string out (to_string (m.kind));
        if (m.s != 1.0)
        {
            char buf[32];
            std::snprintf (buf, sizeof buf, "@%g", m.s);
            out += buf;
        }
        return out;
    }

    struct DisplacementEntry
    {
        double x = 0.0, y = 0.0, theta = 0.0;
    };

    using Displacement = std::vector<DisplacementEntry>;

    /// Absolute angular difference wrapped into [0, pi].
    inline double angular_difference (double from, double to)
    {
        const double d = std::abs (to - from);
        return d < std::numbers::pi ? d : 2.0 * std::numbers::pi - d;
    }

    inline DisplacementEntry scaled_displacement (const Pose &u, const Pose &v, double s)
    {
        return {s * (v.position.x - u.position.x), s * (v.position.y - u.position.y), (1.0 - s) * angular_difference (u.theta, v.theta)};
    }

    inline Displacement displacement (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        if (u.size () != v.size ())
            throw std::invalid_argument ("displacement: configurations differ in robot count");
        Displacement out (u.size ());
        for (std::size_t i = 0; i < u.size (); ++i)
            out[i] = scaled_displacement (u[i], v[i], s);
        return out;
    }

    namespace detail
    {
        inline void check_sizes (std::span<const Pose> u, std::span<const Pose> v)
        {
            if (u.size () != v.size ())
                throw std::invalid_argument ("metric: configurations differ in robot count");
        }

        /// Stack buffer for the common small-m case.
        template <typename T, std::size_t N = 32> class SmallBuffer
        {
          public:
            explicit SmallBuffer (std::size_t n) : n_ (n)
            {
                if (n > N)
                    heap_.resize (n);
            }
            T *data () { return n_ > N ? heap_.data () : stack_.data (); }
            std::span<T> span () { return {data (), n_}; }

          private:
            std::size_t n_;
            std::array<T, N> stack_{};
            std::vector<T> heap_;
        };
    } // namespace detail

    inline double sum_l2 (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        detail::check_sizes (u, v);
        double total = 0.0;
        for (std::size_t i = 0; i < u.size (); ++i)
        {
            const auto d = scaled_displacement (u[i], v[i], s);
            total += std::sqrt (d.x * d.x + d.y * d.y) + d.theta;
        }
        return total;
    }

    inline double max_l2 (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        detail::check_sizes (u, v);
        double best = 0.0;
        for (std::size_t i = 0; i < u.size (); ++i)
        {
            const auto d = scaled_displacement (u[i], v[i], s);
            best = std::max (best, std::sqrt (d.x * d.x + d.y * d.y) + d.theta);
        }
        return best;
    }

    inline double epsinf (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        detail::check_sizes (u, v);
        if (u.empty ())
            return 0.0;
        const auto d0 = scaled_displacement (u[0], v[0], s);
        std::array<double, 3> lo{d0.x, d0.y, d0.theta}, hi = lo;
        for (std::size_t i = 1; i < u.size (); ++i)
        {
            const auto d = scaled_displacement (u[i], v[i], s);
            const std::array<double, 3> c{d.x, d.y, d.theta};
            for (std::size_t k = 0; k < 3; ++k)
            {
                lo[k] = std::min (lo[k], c[k]);
                hi[k] = std::max (hi[k], c[k]);
            }
        }
        double side = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            side = std::max (side, hi[k] - lo[k]);
        return 0.5 * side;
    }

    inline double eps2 (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        detail::check_sizes (u, v);
        const std::size_t m = u.size ();
        if (m <= 1)
            return 0.0;

        bool planar = true;
        const double theta0 = scaled_displacement (u[0], v[0], s).theta;
        for (std::size_t i = 1; i < m && planar; ++i)
            planar = scaled_displacement (u[i], v[i], s).theta == theta0;

        if (planar)
        {
            detail::SmallBuffer<miniball::Vec<2>> pts (m);
            auto p = pts.span ();
            for (std::size_t i = 0; i < m; ++i)
            {
                const auto d = scaled_displacement (u[i], v[i], s);
                p[i] = {d.x, d.y};
            }
            return miniball::smallest_enclosing_ball<2> (p).radius ();
        }
        detail::SmallBuffer<miniball::Vec<3>> pts (m);
        auto p = pts.span ();
        for (std::size_t i = 0; i < m; ++i)
        {
            const auto d = scaled_displacement (u[i], v[i], s);
            p[i] = {d.x, d.y, d.theta};
        }
        return miniball::smallest_enclosing_ball<3> (p).radius ();
    }

    inline double centroid_dist (std::span<const Pose> u, std::span<const Pose> v, double s = 1.0)
    {
        detail::check_sizes (u, v);
        const std::size_t m = u.size ();
        if (m == 0)
            return 0.0;
        double squares = 0.0, sx = 0.0, sy = 0.0, st = 0.0;
        for (std::size_t i = 0; i < m; ++i)
        {
            const auto d = scaled_displacement (u[i], v[i], s);
            squares += d.x * d.x + d.y * d.y + d.theta * d.theta;
            sx += d.x;
            sy += d.y;
            st += d.theta;
        }
        const double value = squares - (sx * sx + sy * sy + st * st) / static_cast<double> (m);
        return std::max (0.0, value);
    }

    inline double eval (const Metric &metric, std::span<const Pose> u, std::span<const Pose> v)
    {
        switch (metric.kind)
        {
        case MetricKind::SumL2:
            return sum_l2 (u, v, metric.s);
        case MetricKind::MaxL2:
            return max_l2 (u, v, metric.s);
        case MetricKind::Eps2:
            return eps2 (u, v, metric.s);
        case MetricKind::EpsInf:
            return epsinf (u, v, metric.s);
        case MetricKind::Ctd:
            return centroid_dist (u, v, metric.s);
        }
        throw std::logic_error ("unreachable metric kind");
    }

    /// Cheap value never exceeding eval(metric, u, v); used to prune scans.
    inline double lower_bound (const Metric &metric, std::span<const Pose> u, std::span<const Pose> v)
    {
        switch (metric.kind)
        {
        case MetricKind::Eps2:
            // any two points of a ball of radius r differ by at most 2r per axis
            return epsinf (u, v, metric.s);
        default:
            return 0.0;
        }
    }

    inline bool has_cheap_lower_bound (const Metric &metric) { return metric.kind == MetricKind::Eps2; }

} // namespace mrmp
