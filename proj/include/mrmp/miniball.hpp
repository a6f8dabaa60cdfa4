#pragma once
/**
 * @file
 * @brief Smallest enclosing ball of a small point set in D dimensions
 *        (randomised incremental construction, expected linear time).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mrmp::miniball
{
    template <std::size_t D> using Vec = std::array<double, D>;

    template <std::size_t D> struct Ball
    {
        Vec<D> center{};
        double radius2 = -1.0; ///< negative: empty ball

        double radius () const { return radius2 <= 0.0 ? 0.0 : std::sqrt (radius2); }
    };

    namespace detail
    {
        template <std::size_t D> double dist2 (const Vec<D> &a, const Vec<D> &b)
        {
            double s = 0.0;
            for (std::size_t k = 0; k < D; ++k)
            {
                const double d = a[k] - b[k];
                s += d * d;
            }
            return s;
        }

        template <std::size_t D> bool contains (const Ball<D> &ball, const Vec<D> &p)
        {
            if (ball.radius2 < 0.0)
                return false;
            const double d2 = dist2 (ball.center, p);
            return d2 <= ball.radius2 * (1.0 + 1e-12) + 1e-24;
        }

        /// Gaussian elimination with partial pivoting on an n x n system (n <= 3).
        /// Returns false when the system is (numerically) singular.
        inline bool solve (std::size_t n, std::array<std::array<double, 4>, 3> a, std::array<double, 3> &x)
        {
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    scale = std::max (scale, std::abs (a[i][j]));
            if (scale == 0.0)
                return false;
            for (std::size_t c = 0; c < n; ++c)
            {
                std::size_t piv = c;
                for (std::size_t r = c + 1; r < n; ++r)
                    if (std::abs (a[r][c]) > std::abs (a[piv][c]))
                        piv = r;
                if (std::abs (a[piv][c]) <= 1e-12 * scale)
                    return false;
                std::swap (a[c], a[piv]);
                for (std::size_t r = c + 1; r < n; ++r)
                {
                    const double f = a[r][c] / a[c][c];
                    for (std::size_t k = c; k <= n; ++k)
                        a[r][k] -= f * a[c][k];
                }
            }
            for (std::size_t i = n; i-- > 0;)
            {
                double s = a[i][n];
                for (std::size_t k = i + 1; k < n; ++k)
                    s -= a[i][k] * x[k];
                x[i] = s / a[i][i];
            }
            return true;
        }

        /// Smallest ball with every support point on its boundary. Degenerate
        /// (affinely dependent) supports fall back to the best sub-support ball
        /// that still covers all of them.
        template <std::size_t D> Ball<D> circumball (std::span<const Vec<D>> support)
        {
            Ball<D> ball;
            const std::size_t k = support.size ();
            if (k == 0)
                return ball;
            if (k == 1)
            {
                ball.center = support[0];
                ball.radius2 = 0.0;
                return ball;
            }

            // centre = p0 + sum_j lambda_j (p_j - p0); 2 G lambda = |p_j - p0|^2
            const std::size_t n = k - 1;
            std::array<Vec<D>, 3> q{};
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t d = 0; d < D; ++d)
                    q[j][d] = support[j + 1][d] - support[0][d];
            std::array<std::array<double, 4>, 3> sys{};
            for (std::size_t i = 0; i < n; ++i)
            {
                for (std::size_t j = 0; j < n; ++j)
                {
                    double g = 0.0;
                    for (std::size_t d = 0; d < D; ++d)
                        g += q[i][d] * q[j][d];
                    sys[i][j] = 2.0 * g;
                }
                double rhs = 0.0;
                for (std::size_t d = 0; d < D; ++d)
                    rhs += q[i][d] * q[i][d];
                sys[i][n] = rhs;
            }
            std::array<double, 3> lambda{};
            if (n <= D && solve (n, sys, lambda))
            {
                ball.center = support[0];
                for (std::size_t j = 0; j < n; ++j)
                    for (std::size_t d = 0; d < D; ++d)
                        ball.center[d] += lambda[j] * q[j][d];
                ball.radius2 = 0.0;
                for (const auto &p : support)
                    ball.radius2 = std::max (ball.radius2, dist2 (ball.center, p));
                return ball;
            }

            Ball<D> best;
            for (std::size_t drop = 0; drop < k; ++drop)
            {
                std::array<Vec<D>, D + 1> sub{};
                std::size_t c = 0;
                for (std::size_t i = 0; i < k; ++i)
                    if (i != drop)
                        sub[c++] = support[i];
                Ball<D> candidate = circumball<D> (std::span<const Vec<D>> (sub.data (), c));
                bool covers = true;
                for (const auto &p : support)
                    covers = covers && contains (candidate, p);
                if (covers && (best.radius2 < 0.0 || candidate.radius2 < best.radius2))
                    best = candidate;
            }
            if (best.radius2 < 0.0)
            {
                // numerically hopeless; centre on the support centroid
                for (const auto &p : support)
                    for (std::size_t d = 0; d < D; ++d)
                        best.center[d] += p[d] / static_cast<double> (k);
                best.radius2 = 0.0;
                for (const auto &p : support)
                    best.radius2 = std::max (best.radius2, dist2 (best.center, p));
            }
            return best;
        }

        template <std::size_t D>
        Ball<D> welzl (std::span<const Vec<D>> pts, std::size_t n, std::array<Vec<D>, D + 1> &support, std::size_t k)
        {
            Ball<D> ball = circumball<D> (std::span<const Vec<D>> (support.data (), k));
            if (k == D + 1)
                return ball;
            for (std::size_t i = 0; i < n; ++i)
            {
                if (contains (ball, pts[i]))
                    continue;
                support[k] = pts[i];
                ball = welzl<D> (pts, i, support, k + 1);
            }
            return ball;
        }
    } // namespace detail

    /// Exact smallest enclosing ball. `pts` is permuted in place with a fixed
    /// pseudo-random order so results are reproducible.
    template <std::size_t D> Ball<D> smallest_enclosing_ball (std::span<Vec<D>> pts)
    {
        const std::size_t n = pts.size ();
        std::uint64_t state = 0x2545f4914f6cdd1dULL ^ n;
        for (std::size_t i = n; i > 1; --i)
        {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            std::swap (pts[i - 1], pts[(state >> 33) % i]);
        }
        std::array<Vec<D>, D + 1> support{};
        return detail::welzl<D> (std::span<const Vec<D>> (pts.data (), n), n, support, 0);
    }

} // namespace mrmp::miniball
