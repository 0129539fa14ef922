#include "jmlab/sector_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace jmlab {

namespace {

struct Offset {
    int di;
    int dj;
};

std::vector<Offset> coprime_offsets(int k) {
    std::vector<Offset> out;
    for (int di = -k; di <= k; ++di) {
        for (int dj = -k; dj <= k; ++dj) {
            if (di == 0 && dj == 0) continue;
            if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
            out.push_back({di, dj});
        }
    }
    return out;
}

} // namespace

OracleResult oracle_shortest_path(const SectorMetric& metric, std::array<double, 2> a,
                                  std::array<double, 2> b, const OracleParams& params) {
    if (params.resolution < 100) throw std::invalid_argument("oracle resolution must be >= 100");
    if (params.neighbor_order < 1) throw std::invalid_argument("neighbor order must be >= 1");
    if (!(params.rho_max > 0.0)) throw std::invalid_argument("rho_max must be positive");

    const double opening = metric.opening();
    // Round the ring count up to a multiple of 3 so that with the default
    // rho_max = 1.5 the circle rho = 1 is exactly a grid ring.
    const int rings = ((params.resolution + 3) / 3) * 3;
    const int nang = params.resolution + 1;
    const double drho = params.rho_max / rings;
    const double dpsi = opening / (nang - 1);

    auto snap = [&](std::array<double, 2> p, const char* which) -> std::int64_t {
        double rho = std::hypot(p[0], p[1]);
        if (rho > params.rho_max * (1.0 + 1e-9))
            throw std::invalid_argument(std::string(which) + " endpoint lies beyond rho_max");
        double psi = std::atan2(p[1], p[0]);
        if (psi < -1e-9 || psi > opening + 1e-9)
            throw std::invalid_argument(std::string(which) + " endpoint lies outside the wedge");
        long i = std::lround(rho / drho);
        if (i <= 0) return static_cast<std::int64_t>(rings) * nang;  // vertex node
        i = std::min<long>(i, rings);
        long j = std::lround(std::clamp(psi, 0.0, opening) / dpsi);
        j = std::clamp<long>(j, 0, nang - 1);
        return (i - 1) * static_cast<std::int64_t>(nang) + j;
    };

    const std::int64_t vertex_id = static_cast<std::int64_t>(rings) * nang;
    const std::int64_t node_count = vertex_id + 1;
    const std::int64_t src = snap(a, "start");
    const std::int64_t dst = snap(b, "end");
    if (src == dst) throw std::invalid_argument("oracle endpoints snap to the same node");

    std::vector<double> cosj(nang), sinj(nang);
    std::vector<int> secj(nang);
    for (int j = 0; j < nang; ++j) {
        double psi = j * dpsi;
        cosj[j] = std::cos(psi);
        sinj[j] = std::sin(psi);
        secj[j] = metric.sector_of(psi);
    }
    const auto& sectors = metric.sectors();
    double n_min = sectors[0].index;
    for (const auto& s : sectors) n_min = std::min(n_min, s.index);

    auto coord = [&](std::int64_t id) -> std::array<double, 2> {
        if (id == vertex_id) return {0.0, 0.0};
        long i = static_cast<long>(id / nang) + 1;
        long j = static_cast<long>(id % nang);
        double rho = i * drho;
        return {rho * cosj[j], rho * sinj[j]};
    };

    std::array<double, 2> target = coord(dst);
    auto heuristic = [&](std::array<double, 2> p) {
        return n_min * std::hypot(p[0] - target[0], p[1] - target[1]);
    };

    const std::vector<Offset> offsets = coprime_offsets(params.neighbor_order);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(node_count), inf);
    std::vector<std::int64_t> parent(static_cast<std::size_t>(node_count), -1);
    std::vector<char> settled(static_cast<std::size_t>(node_count), 0);

    using Entry = std::pair<double, std::int64_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    dist[static_cast<std::size_t>(src)] = 0.0;
    heap.push({heuristic(coord(src)), src});

    std::size_t expanded = 0;

    auto relax = [&](std::int64_t from, std::array<double, 2> pfrom, std::int64_t to,
                     double weight) {
        double nd = dist[static_cast<std::size_t>(from)] + weight;
        if (nd < dist[static_cast<std::size_t>(to)]) {
            dist[static_cast<std::size_t>(to)] = nd;
            parent[static_cast<std::size_t>(to)] = from;
            heap.push({nd + heuristic(coord(to)), to});
        }
        (void)pfrom;
    };

    while (!heap.empty()) {
        auto [f, u] = heap.top();
        heap.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;
        ++expanded;
        if (u == dst) break;

        std::array<double, 2> pu = coord(u);
        if (u == vertex_id) {
            for (int j = 0; j < nang; ++j) {
                std::int64_t v = j;  // ring 1
                relax(u, pu, v, sectors[static_cast<std::size_t>(secj[j])].index * drho);
            }
            continue;
        }
        long i = static_cast<long>(u / nang) + 1;
        long j = static_cast<long>(u % nang);
        if (i == 1) {
            relax(u, pu, vertex_id, sectors[static_cast<std::size_t>(secj[j])].index * drho);
        }
        for (const Offset& o : offsets) {
            long i2 = i + o.di;
            long j2 = j + o.dj;
            if (i2 < 1 || i2 > rings || j2 < 0 || j2 >= nang) continue;
            std::int64_t v = (i2 - 1) * static_cast<std::int64_t>(nang) + j2;
            if (settled[static_cast<std::size_t>(v)]) continue;
            double x2 = i2 * drho * cosj[j2];
            double y2 = i2 * drho * sinj[j2];
            double w;
            if (secj[j] == secj[j2]) {
                // Angle is monotone along the edge, so the whole edge stays
                // inside the shared sector.
                w = sectors[static_cast<std::size_t>(secj[j])].index *
                    std::hypot(x2 - pu[0], y2 - pu[1]);
            } else {
                w = metric.segment_weight(pu[0], pu[1], x2, y2);
            }
            relax(u, pu, v, w);
        }
    }

    if (!settled[static_cast<std::size_t>(dst)])
        throw std::runtime_error("oracle search did not reach the target node");

    OracleResult out;
    out.length = dist[static_cast<std::size_t>(dst)];
    out.expanded = expanded;
    out.hits_vertex = false;
    std::vector<std::array<double, 2>> rev;
    for (std::int64_t v = dst; v != -1; v = parent[static_cast<std::size_t>(v)]) {
        if (v == vertex_id) out.hits_vertex = true;
        rev.push_back(coord(v));
    }
    out.path.assign(rev.rbegin(), rev.rend());
    return out;
}

} // namespace jmlab
