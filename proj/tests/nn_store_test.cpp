#include "mrmp/nn_store.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

namespace mrmp
{
namespace
{

JointConfig line (std::initializer_list<double> xs)
{
    JointConfig u;
    for (double x : xs)
        u.push_back (Pose{{x, 0.0}, 0.0});
    return u;
}

TEST (NnStore, InsertAndQuery)
{
    NnStore store (Metric (MetricKind::SumL2));
    EXPECT_THROW (store.nearest (line ({0})), std::logic_error);
    store.insert (line ({5}), 10);
    EXPECT_EQ (store.nearest (line ({5})).id, 10u);
    EXPECT_EQ (store.nearest (line ({5})).distance, 0.0);
    store.insert (line ({3}), 11);
    store.insert (line ({7}), 12);
    EXPECT_EQ (store.size (), 3u);
    EXPECT_THROW (store.insert (line ({1}), 11), std::invalid_argument);
    EXPECT_THROW (store.insert (line ({1, 2}), 13), std::invalid_argument);
    // distances 5, 3, 7 from the origin
    const auto n = store.nearest (line ({0}));
    EXPECT_EQ (n.id, 11u);
    EXPECT_DOUBLE_EQ (n.distance, 3.0);
}

TEST (NnStore, TiesGoToEarliestInsertion)
{
    NnStore store (Metric (MetricKind::MaxL2));
    store.insert (line ({2}), 7);
    store.insert (line ({-2}), 3);
    store.insert (line ({2}), 1);
    EXPECT_EQ (store.nearest (line ({0})).id, 7u);

    // eps2 pruning must not change the tie rule
    NnStore eps (Metric (MetricKind::Eps2));
    eps.insert (line ({0, 1}), 4);
    eps.insert (line ({5, 6}), 2);
    EXPECT_EQ (eps.nearest (line ({10, 11})).id, 4u);
}

TEST (NnStore, MatchesLinearScan)
{
    Rng rng (99);
    for (auto k : all_metric_kinds)
    {
        const Metric metric (k);
        NnStore store (metric);
        std::vector<JointConfig> items;
        for (ItemId i = 0; i < 300; ++i)
        {
            items.push_back (oracle::random_config (rng, 4));
            store.insert (items.back (), i);
        }
        for (int q = 0; q < 100; ++q)
        {
            const auto query = oracle::random_config (rng, 4);
            std::size_t best = 0;
            for (std::size_t i = 1; i < items.size (); ++i)
                if (eval (metric, items[i], query) < eval (metric, items[best], query))
                    best = i;
            const auto n = store.nearest (query);
            EXPECT_EQ (n.id, best) << to_string (k);
            EXPECT_EQ (n.distance, eval (metric, items[best], query));
        }
    }
}

TEST (NnStore, SqrtCtdKeepsArgmin)
{
    Rng rng (5);
    NnStore store (Metric (MetricKind::Ctd));
    std::vector<JointConfig> items;
    for (ItemId i = 0; i < 200; ++i)
    {
        items.push_back (oracle::random_config (rng, 3));
        store.insert (items.back (), i);
    }
    for (int q = 0; q < 50; ++q)
    {
        const auto query = oracle::random_config (rng, 3);
        std::size_t best = 0;
        for (std::size_t i = 1; i < items.size (); ++i)
            if (std::sqrt (centroid_dist (items[i], query)) < std::sqrt (centroid_dist (items[best], query)))
                best = i;
        EXPECT_EQ (store.nearest (query).id, best);
    }
}

TEST (AlternatingStore, RoundRobin)
{
    const std::vector<Metric> metrics{Metric (MetricKind::SumL2), Metric (MetricKind::Eps2)};
    AlternatingStore store (metrics);
    EXPECT_THROW (AlternatingStore (std::span<const Metric>{}), std::invalid_argument);
    // a: small sum, large spread; b: pure translation
    store.insert (line ({1, -1}), 0);
    store.insert (line ({3, 3}), 1);
    EXPECT_EQ (store.store (0).size (), store.store (1).size ());
    const auto q = line ({0, 0});
    EXPECT_EQ (store.cursor (), 0u);
    EXPECT_EQ (store.nearest (q).id, 0u);
    EXPECT_EQ (store.cursor (), 1u);
    EXPECT_EQ (store.nearest (q).id, 1u);
    EXPECT_EQ (store.cursor (), 0u);
    EXPECT_EQ (store.nearest (q).id, 0u);
}

TEST (AlternatingStore, SingleMetricMatchesPlain)
{
    Rng rng (8);
    const std::vector<Metric> one{Metric (MetricKind::Ctd)};
    AlternatingStore alt (one);
    NnStore plain (one[0]);
    for (ItemId i = 0; i < 100; ++i)
    {
        const auto u = oracle::random_config (rng, 3);
        alt.insert (u, i);
        plain.insert (u, i);
    }
    for (int q = 0; q < 50; ++q)
    {
        const auto query = oracle::random_config (rng, 3);
        const auto a = alt.nearest (query), b = plain.nearest (query);
        EXPECT_EQ (a.id, b.id);
        EXPECT_EQ (a.distance, b.distance);
    }
}

} // namespace
} // namespace mrmp
