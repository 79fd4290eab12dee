#pragma once

// Independent Farey graph oracle: plain int64 slopes, explicit adjacency by
// the determinant test, breadth-first search. Exact for pairs of slopes in
// [lo, hi] or inf because geodesics stay inside the ladder between them.

#include <cstdint>
#include <deque>
#include <numeric>
#include <vector>

namespace oracle {

struct SmallSlope {
    std::int64_t p, q;  // q == 0 means inf
};

class FareyPatch {
public:
    FareyPatch(std::int64_t max_den, std::int64_t lo, std::int64_t hi) {
        slopes_.push_back({1, 0});
        for (std::int64_t q = 1; q <= max_den; ++q)
            for (std::int64_t p = lo * q; p <= hi * q; ++p)
                if (std::gcd(p, q) == 1) slopes_.push_back({p, q});
        const std::size_t n = slopes_.size();
        adj_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto det = slopes_[i].p * slopes_[j].q - slopes_[j].p * slopes_[i].q;
                if (det == 1 || det == -1) {
                    adj_[i].push_back(static_cast<std::uint32_t>(j));
                    adj_[j].push_back(static_cast<std::uint32_t>(i));
                }
            }
    }

    const std::vector<SmallSlope>& slopes() const { return slopes_; }

    std::vector<std::int32_t> bfs(std::size_t source) const {
        std::vector<std::int32_t> dist(slopes_.size(), -1);
        std::deque<std::size_t> queue{source};
        dist[source] = 0;
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            for (auto v : adj_[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
        }
        return dist;
    }

private:
    std::vector<SmallSlope> slopes_;
    std::vector<std::vector<std::uint32_t>> adj_;
};

}  // namespace oracle
