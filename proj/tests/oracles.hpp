#pragma once

// Test-only reference implementations. Nothing here calls into the metric
// code it is used to check.

#include "mrmp/geometry.hpp"
#include "mrmp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace mrmp::oracle
{

inline JointConfig random_config (Rng &rng, std::size_t m, double lo = -10.0, double hi = 10.0, bool rotating = false)
{
    JointConfig u (m);
    for (auto &p : u)
    {
        p.position = {rng.uniform (lo, hi), rng.uniform (lo, hi)};
        if (rotating)
            p.theta = normalize_angle (rng.uniform (-std::numbers::pi, std::numbers::pi));
    }
    return u;
}

inline std::vector<Point2> raw_displacements (const JointConfig &u, const JointConfig &v)
{
    std::vector<Point2> d;
    for (std::size_t i = 0; i < u.size (); ++i)
        d.push_back ({v[i].position.x - u[i].position.x, v[i].position.y - u[i].position.y});
    return d;
}

/// Minimizes f over translations: a coarse grid over the bounding box of `pts`
/// followed by local grids, each four times finer than the last, until the spacing
/// drops below `tol`, then line searches.
inline double minimize_over_translations (const std::vector<Point2> &pts, const std::function<double (Point2)> &f, double tol = 1e-4)
{
    double x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
    for (const auto &p : pts)
    {
        x0 = std::min (x0, p.x);
        x1 = std::max (x1, p.x);
        y0 = std::min (y0, p.y);
        y1 = std::max (y1, p.y);
    }
    const int n = 40;
    double h = std::max ({x1 - x0, y1 - y0, 1e-9}) / n;
    Point2 best{x0, y0};
    double best_value = f (best);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
        {
            const Point2 t{x0 + i * h, y0 + j * h};
            const double val = f (t);
            if (val < best_value)
            {
                best_value = val;
                best = t;
            }
        }
    // the local grid is re-centred until it stops moving before refining, so
    // the search can follow a narrow valley of a non-smooth objective
    while (h > tol * 0.1)
    {
        for (bool moved = true; moved;)
        {
            moved = false;
            const Point2 centre = best;
            for (int i = -8; i <= 8; ++i)
                for (int j = -8; j <= 8; ++j)
                {
                    const Point2 t{centre.x + i * h * 0.25, centre.y + j * h * 0.25};
                    const double val = f (t);
                    if (val < best_value)
                    {
                        best_value = val;
                        best = t;
                        moved = true;
                    }
                }
        }
        h *= 0.25;
    }

    // polish with golden-section line searches along a fan of directions; f is
    // convex, so some direction descends unless we are at the minimum
    const double span = std::max ({x1 - x0, y1 - y0, 1e-9});
    for (int round = 0; round < 50; ++round)
    {
        const double before = best_value;
        for (int k = 0; k < 180; ++k)
        {
            const double a = std::numbers::pi * (k + 0.5 * (round % 2)) / 180.0;
            const Point2 dir{std::cos (a), std::sin (a)};
            auto along = [&] (double t) { return f (best + t * dir); };
            double lo = -span, hi = span;
            const double g = 0.5 * (std::sqrt (5.0) - 1.0);
            double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
            double fc = along (c), fd = along (d);
            while (hi - lo > 1e-10 * span)
            {
                if (fc < fd)
                {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - g * (hi - lo);
                    fc = along (c);
                }
                else
                {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + g * (hi - lo);
                    fd = along (d);
                }
            }
            const double t = 0.5 * (lo + hi);
            const double val = along (t);
            if (val < best_value)
            {
                best_value = val;
                best = best + t * dir;
            }
        }
        if (before - best_value < 1e-12)
            break;
    }
    return best_value;
}

/// min over T of max_i |d_i - T|, with the Euclidean norm.
inline double eps2_bruteforce (const JointConfig &u, const JointConfig &v)
{
    const auto d = raw_displacements (u, v);
    return minimize_over_translations (d, [&] (Point2 t) {
        double worst = 0.0;
        for (const auto &p : d)
            worst = std::max (worst, std::hypot (p.x - t.x, p.y - t.y));
        return worst;
    });
}

/// Same with the max norm.
inline double epsinf_bruteforce (const JointConfig &u, const JointConfig &v)
{
    const auto d = raw_displacements (u, v);
    return minimize_over_translations (d, [&] (Point2 t) {
        double worst = 0.0;
        for (const auto &p : d)
            worst = std::max ({worst, std::abs (p.x - t.x), std::abs (p.y - t.y)});
        return worst;
    });
}

/// min over T of sum_i |d_i - T|^2.
inline double ctd_bruteforce (const JointConfig &u, const JointConfig &v)
{
    const auto d = raw_displacements (u, v);
    return minimize_over_translations (d, [&] (Point2 t) {
        double total = 0.0;
        for (const auto &p : d)
            total += (p.x - t.x) * (p.x - t.x) + (p.y - t.y) * (p.y - t.y);
        return total;
    });
}

} // namespace mrmp::oracle
