#pragma once
/**
 * @file
 * @brief Exact nearest-neighbour storage over joint configurations under a
 *        multi-robot metric, and the round-robin multi-metric variant.
 */

#include "mrmp/geometry.hpp"
#include "mrmp/metrics.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mrmp
{
    using ItemId = std::uint64_t;

    struct Neighbor
    {
        ItemId id = 0;
        double distance = 0.0;
    };

    /// Append-only linear-scan store. Configurations are kept contiguously,
    /// `robots()` poses per item.
    class NnStore
    {
      public:
        explicit NnStore (Metric metric, std::size_t robots = 0) : metric_ (metric), robots_ (robots) {}

        const Metric &metric () const { return metric_; }
        std::size_t size () const { return ids_.size (); }
        bool empty () const { return ids_.empty (); }
        std::size_t robots () const { return robots_; }

        void insert (std::span<const Pose> config, ItemId id)
        {
            if (robots_ == 0 && ids_.empty ())
                robots_ = config.size ();
            if (config.size () != robots_)
                throw std::invalid_argument ("NnStore::insert: configuration has wrong robot count");
            if (!seen_.insert (id).second)
                throw std::invalid_argument ("NnStore::insert: duplicate id " + std::to_string (id));
            poses_.insert (poses_.end (), config.begin (), config.end ());
            ids_.push_back (id);
        }

        std::span<const Pose> config (std::size_t index) const { return {poses_.data () + index * robots_, robots_}; }
        ItemId id (std::size_t index) const { return ids_[index]; }

        /// Exhaustive scan; exact ties go to the earliest inserted item.
        Neighbor nearest (std::span<const Pose> query) const
        {
            if (ids_.empty ())
                throw std::logic_error ("NnStore::nearest: store is empty");
            if (query.size () != robots_)
                throw std::invalid_argument ("NnStore::nearest: query has wrong robot count");

            const bool prune = has_cheap_lower_bound (metric_);
            std::size_t best_index = 0;
            double best = std::numeric_limits<double>::infinity ();
            for (std::size_t i = 0; i < ids_.size (); ++i)
            {
                const auto item = config (i);
                if (prune && lower_bound (metric_, item, query) * (1.0 - 1e-12) >= best)
                    continue;
                const double d = eval (metric_, item, query);
                if (d < best)
                {
                    best = d;
                    best_index = i;
                }
            }
            return {ids_[best_index], best};
        }

      private:
        Metric metric_;
        std::size_t robots_;
        std::vector<Pose> poses_;
        std::vector<ItemId> ids_;
        std::unordered_set<ItemId> seen_;
    };

    /// One store per metric holding identical items; each query uses the store
    /// at the cursor and then advances it.
    class AlternatingStore
    {
      public:
        explicit AlternatingStore (std::span<const Metric> metrics, std::size_t robots = 0)
        {
            if (metrics.empty ())
                throw std::invalid_argument ("AlternatingStore: needs at least one metric");
            for (const auto &m : metrics)
                stores_.emplace_back (m, robots);
        }

        std::size_t store_count () const { return stores_.size (); }
        std::size_t cursor () const { return cursor_; }
        const NnStore &store (std::size_t i) const { return stores_[i]; }
        std::size_t size () const { return stores_.front ().size (); }

        void insert (std::span<const Pose> config, ItemId id)
        {
            for (auto &s : stores_)
                s.insert (config, id);
        }

        Neighbor nearest (std::span<const Pose> query)
        {
            const Neighbor n = stores_[cursor_].nearest (query);
            cursor_ = (cursor_ + 1) % stores_.size ();
            return n;
        }

      private:
        std::vector<NnStore> stores_;
        std::size_t cursor_ = 0;
    };

} // namespace mrmp
