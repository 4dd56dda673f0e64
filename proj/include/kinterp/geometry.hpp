#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "kinterp/error.hpp"

namespace kinterp {

// Axis-aligned box. Defaults to the unit cube.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    Box() = default;
    Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi))
    {
        if (lower.empty() || lower.size() != upper.size()) throw domain_error("box corners must have equal, positive dimension");
        for (std::size_t i = 0; i < lower.size(); ++i)
            if (!(upper[i] > lower[i])) throw domain_error("box must have nonempty interior");
    }

    static Box unit(int d) { return Box(std::vector<double>(static_cast<std::size_t>(d), 0.0), std::vector<double>(static_cast<std::size_t>(d), 1.0)); }

    int dim() const noexcept { return static_cast<int>(lower.size()); }
    double side(int i) const { return upper[static_cast<std::size_t>(i)] - lower[static_cast<std::size_t>(i)]; }
    double center(int i) const { return 0.5 * (upper[static_cast<std::size_t>(i)] + lower[static_cast<std::size_t>(i)]); }
    double max_half_width() const
    {
        double w = 0;
        for (int i = 0; i < dim(); ++i) w = std::max(w, 0.5 * side(i));
        return w;
    }
    double volume() const
    {
        double v = 1;
        for (int i = 0; i < dim(); ++i) v *= side(i);
        return v;
    }
    bool contains(std::span<const double> x, double slack = 0) const
    {
        for (int i = 0; i < dim(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (x[k] < lower[k] - slack || x[k] > upper[k] + slack) return false;
        }
        return true;
    }
    // Box shrunk by `margin` on every side.
    Box shrunk(double margin) const
    {
        Box b = *this;
        for (std::size_t i = 0; i < lower.size(); ++i) {
            b.lower[i] += margin;
            b.upper[i] -= margin;
            if (!(b.upper[i] > b.lower[i])) throw domain_error("shrink margin empties the box");
        }
        return b;
    }

    friend bool operator==(const Box&, const Box&) = default;
};

struct PointSetQuality {
    double separation = 0;  // q
    double fill = 0;        // h, measured on the probe grid
    double mesh_ratio = 0;  // h / q
    int probe_level = 0;
};

// Finite center set inside a box, stored as a flat row-major coordinate array.
class PointSet {
public:
    PointSet() = default;
    PointSet(Box domain, std::vector<double> coords) : domain_(std::move(domain)), coords_(std::move(coords))
    {
        const auto d = static_cast<std::size_t>(domain_.dim());
        if (d == 0) throw domain_error("point set needs a domain");
        if (coords_.size() % d != 0) throw domain_error("coordinate array length is not a multiple of d");
        for (std::size_t i = 0; i < size(); ++i) {
            for (double c : point(i))
                if (!std::isfinite(c)) throw geometry_error("non-finite coordinate");
            if (!domain_.contains(point(i), 1e-14)) throw geometry_error("point " + std::to_string(i) + " lies outside the domain");
        }
    }

    const Box& domain() const noexcept { return domain_; }
    int dim() const noexcept { return domain_.dim(); }
    std::size_t size() const noexcept { return domain_.dim() ? coords_.size() / static_cast<std::size_t>(domain_.dim()) : 0; }
    std::span<const double> point(std::size_t i) const
    {
        const auto d = static_cast<std::size_t>(dim());
        return {coords_.data() + i * d, d};
    }
    const std::vector<double>& coords() const noexcept { return coords_; }

    const std::optional<PointSetQuality>& quality() const noexcept { return quality_; }
    void set_quality(const PointSetQuality& q) { quality_ = q; }

private:
    Box domain_;
    std::vector<double> coords_;
    std::optional<PointSetQuality> quality_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

// Uniform bucket grid over the domain for radius and nearest-neighbour queries.
class BucketGrid {
public:
    explicit BucketGrid(const PointSet& ps, double cell = 0) : ps_(&ps), d_(ps.dim())
    {
        const Box& box = ps.domain();
        if (!(cell > 0)) {
            const double n = std::max<double>(1.0, static_cast<double>(ps.size()));
            cell = std::pow(box.volume() / n, 1.0 / d_);
        }
        // keep the bucket count bounded
        constexpr double max_cells = 1 << 22;
        for (;;) {
            double total = 1;
            for (int i = 0; i < d_; ++i) total *= std::ceil(box.side(i) / cell) + 1;
            if (total <= max_cells) break;
            cell *= 2;
        }
        cell_ = cell;
        counts_.resize(static_cast<std::size_t>(d_));
        std::size_t total = 1;
        for (int i = 0; i < d_; ++i) {
            counts_[static_cast<std::size_t>(i)] = static_cast<long>(std::ceil(box.side(i) / cell_)) + 1;
            total *= static_cast<std::size_t>(counts_[static_cast<std::size_t>(i)]);
        }
        start_.assign(total + 1, 0);
        std::vector<std::size_t> bucket_of(ps.size());
        for (std::size_t p = 0; p < ps.size(); ++p) {
            bucket_of[p] = linear(cell_of(ps.point(p)));
            ++start_[bucket_of[p] + 1];
        }
        for (std::size_t b = 0; b < total; ++b) start_[b + 1] += start_[b];
        items_.resize(ps.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t p = 0; p < ps.size(); ++p) items_[fill[bucket_of[p]]++] = p;
    }

    double cell_size() const noexcept { return cell_; }

    // Calls f(index, squared distance) for every point with |p - x| <= radius (closed ball).
    template <class F>
    void for_each_within(std::span<const double> x, double radius, F&& f) const
    {
        const double r2 = radius * radius;
        std::vector<long> lo(static_cast<std::size_t>(d_)), hi(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double origin = ps_->domain().lower[k];
            lo[k] = std::clamp(static_cast<long>(std::floor((x[k] - radius - origin) / cell_)), 0L, counts_[k] - 1);
            hi[k] = std::clamp(static_cast<long>(std::floor((x[k] + radius - origin) / cell_)), 0L, counts_[k] - 1);
        }
        visit_box(lo, hi, [&](std::size_t bucket) {
            for (std::size_t j = start_[bucket]; j < start_[bucket + 1]; ++j) {
                const std::size_t p = items_[j];
                const double s = squared_distance(ps_->point(p), x);
                if (s <= r2) f(p, s);
            }
        });
    }

    // Distance from x to the nearest point other than `exclude`.
    double nearest_distance(std::span<const double> x, std::size_t exclude = static_cast<std::size_t>(-1)) const
    {
        if (ps_->size() == 0 || (ps_->size() == 1 && exclude == 0)) return std::numeric_limits<double>::infinity();
        std::vector<long> c = cell_of(x);
        double best2 = std::numeric_limits<double>::infinity();
        long max_ring = 0;
        for (int i = 0; i < d_; ++i) max_ring = std::max(max_ring, counts_[static_cast<std::size_t>(i)]);
        for (long ring = 0; ring <= max_ring; ++ring) {
            // every point in an unvisited cell is farther than (ring - 1) * cell from x
            const double reach = (ring - 1) * cell_;
            if (ring > 0 && reach > 0 && reach * reach > best2) break;
            std::vector<long> lo(static_cast<std::size_t>(d_)), hi(static_cast<std::size_t>(d_));
            for (std::size_t k = 0; k < static_cast<std::size_t>(d_); ++k) {
                lo[k] = std::max(0L, c[k] - ring);
                hi[k] = std::min(counts_[k] - 1, c[k] + ring);
            }
            visit_box(lo, hi, [&](std::size_t bucket, const std::vector<long>& idx) {
                long cheb = 0;
                for (std::size_t k = 0; k < idx.size(); ++k) cheb = std::max(cheb, std::abs(idx[k] - c[k]));
                if (cheb != ring) return;
                for (std::size_t j = start_[bucket]; j < start_[bucket + 1]; ++j) {
                    const std::size_t p = items_[j];
                    if (p == exclude) continue;
                    best2 = std::min(best2, squared_distance(ps_->point(p), x));
                }
            });
        }
        return std::sqrt(best2);
    }

private:
    std::vector<long> cell_of(std::span<const double> x) const
    {
        std::vector<long> c(static_cast<std::size_t>(d_));
        for (std::size_t k = 0; k < static_cast<std::size_t>(d_); ++k) {
            const double origin = ps_->domain().lower[k];
            c[k] = std::clamp(static_cast<long>(std::floor((x[k] - origin) / cell_)), 0L, counts_[k] - 1);
        }
        return c;
    }
    std::size_t linear(const std::vector<long>& c) const
    {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < c.size(); ++k) idx = idx * static_cast<std::size_t>(counts_[k]) + static_cast<std::size_t>(c[k]);
        return idx;
    }
    template <class F>
    void visit_box(const std::vector<long>& lo, const std::vector<long>& hi, F&& f) const
    {
        std::vector<long> idx = lo;
        for (;;) {
            if constexpr (std::is_invocable_v<F, std::size_t, const std::vector<long>&>)
                f(linear(idx), idx);
            else
                f(linear(idx));
            std::size_t k = idx.size();
            while (k > 0) {
                --k;
                if (++idx[k] <= hi[k]) break;
                idx[k] = lo[k];
                if (k == 0) return;
            }
            if (idx.empty()) return;
        }
    }

    const PointSet* ps_;
    int d_;
    double cell_ = 1;
    std::vector<long> counts_;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> items_;
};

// q = 1/2 min over pairs of |xi - zeta|. Zero when the set has duplicates.
inline double separation_radius(const PointSet& ps)
{
    if (ps.size() < 2) throw domain_error("separation radius needs at least 2 points");
    BucketGrid grid(ps);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ps.size(); ++i) best = std::min(best, grid.nearest_distance(ps.point(i), i));
    return 0.5 * best;
}

// Tensor probe grid with 2^level + 1 nodes per axis, last axis fastest.
inline std::vector<double> probe_grid(const Box& box, int level, std::size_t max_nodes = 2'000'000)
{
    if (level < 0 || level > 30) throw domain_error("probe level out of range");
    const std::size_t per_axis = (std::size_t{1} << level) + 1;
    const int d = box.dim();
    double total = std::pow(static_cast<double>(per_axis), d);
    if (total > static_cast<double>(max_nodes)) throw resource_error("probe grid exceeds the node budget");
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(total) * static_cast<std::size_t>(d));
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        for (int i = 0; i < d; ++i) {
            const auto k = static_cast<std::size_t>(i);
            nodes.push_back(idx[k] + 1 == per_axis ? box.upper[k]
                                                   : box.lower[k] + box.side(i) * static_cast<double>(idx[k]) / static_cast<double>(per_axis - 1));
        }
        std::size_t k = idx.size();
        bool done = true;
        while (k > 0) {
            --k;
            if (++idx[k] < per_axis) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if (done) break;
    }
    return nodes;
}

// Max over a probe grid of the distance to the nearest center. A lower approximation of
// sup_x dist(x, Xi) with error at most (probe spacing) * sqrt(d) / 2.
inline double fill_distance(const PointSet& ps, int probe_level)
{
    if (ps.size() == 0) throw domain_error("fill distance of an empty set");
    BucketGrid grid(ps);
    const auto probes = probe_grid(ps.domain(), probe_level);
    const auto d = static_cast<std::size_t>(ps.dim());
    double h = 0;
    for (std::size_t p = 0; p < probes.size(); p += d) h = std::max(h, grid.nearest_distance({probes.data() + p, d}));
    return h;
}

inline PointSetQuality measure_quality(const PointSet& ps, int probe_level)
{
    PointSetQuality q;
    q.separation = separation_radius(ps);
    q.fill = fill_distance(ps, probe_level);
    q.mesh_ratio = q.fill / q.separation;
    q.probe_level = probe_level;
    return q;
}

inline double mesh_ratio(const PointSet& ps)
{
    if (!ps.quality()) throw domain_error("mesh ratio requested before q and h were measured");
    return ps.quality()->fill / ps.quality()->separation;
}

struct GenerateOptions {
    std::size_t max_points = 5000;
    int probe_refinement = 3;  // probe grid is 2^probe_refinement times finer than the point grid
};

// Tensor grid with 2^level intervals per axis. Coordinates of interior grid lines are
// displaced by jitter * spacing * u, u ~ U[-1, 1]; boundary coordinates stay on the boundary.
inline PointSet generate_point_set(const Box& domain, int level, double jitter, std::uint64_t seed,
                                   const GenerateOptions& opts = {})
{
    if (level < 0) throw domain_error("level must be nonnegative");
    if (!(jitter >= 0 && jitter < 0.5)) throw domain_error("jitter must lie in [0, 0.5)");
    const int d = domain.dim();
    if (level > 30) throw resource_error("level too large");
    const std::size_t per_axis = (std::size_t{1} << level) + 1;
    if (std::pow(static_cast<double>(per_axis), d) > static_cast<double>(opts.max_points))
        throw resource_error("point set at level " + std::to_string(level) + " exceeds the budget of " +
                             std::to_string(opts.max_points) + " points");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> coords;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        for (int i = 0; i < d; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double spacing = domain.side(i) / static_cast<double>(per_axis - 1);
            double x = idx[k] + 1 == per_axis ? domain.upper[k] : domain.lower[k] + spacing * static_cast<double>(idx[k]);
            if (jitter > 0) {
                const double u = unif(rng);  // drawn for every coordinate so the stream does not depend on position
                if (idx[k] > 0 && idx[k] + 1 < per_axis) x += jitter * spacing * u;
            }
            coords.push_back(x);
        }
        std::size_t k = idx.size();
        bool done = true;
        while (k > 0) {
            --k;
            if (++idx[k] < per_axis) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
        if (done) break;
    }
    PointSet ps(domain, std::move(coords));
    if (ps.size() >= 2) ps.set_quality(measure_quality(ps, level + opts.probe_refinement));
    return ps;
}

// Plain text: header "# d=<d> n=<n>", then one point per line with 17 significant digits.
inline void write_point_set(std::ostream& os, const PointSet& ps)
{
    os << "# d=" << ps.dim() << " n=" << ps.size() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto p = ps.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) os << (k ? " " : "") << p[k];
        os << '\n';
    }
    if (!os) throw io_error("failed writing point set");
}

inline PointSet read_point_set(std::istream& is, const Box& domain)
{
    std::string line;
    if (!std::getline(is, line)) throw io_error("point set file is empty");
    int d = 0;
    std::size_t n = 0;
    if (std::sscanf(line.c_str(), "# d=%d n=%zu", &d, &n) != 2) throw io_error("malformed point set header: " + line);
    if (d != domain.dim()) throw io_error("point set dimension does not match the domain");
    std::vector<double> coords;
    coords.reserve(n * static_cast<std::size_t>(d));
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double v = 0;
        int count = 0;
        while (ls >> v) {
            coords.push_back(v);
            ++count;
        }
        if (count != d) throw io_error("point line has " + std::to_string(count) + " coordinates, expected " + std::to_string(d));
    }
    if (coords.size() != n * static_cast<std::size_t>(d)) throw io_error("point count does not match header");
    return PointSet(domain, std::move(coords));
}

}  // namespace kinterp
