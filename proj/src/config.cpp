#include "stochgeo/config.hpp"

#include <algorithm>
#include <cmath>

namespace stochgeo {

std::string mark_kind_name(MarkKind k) {
    switch (k) {
        case MarkKind::None: return "none";
        case MarkKind::Time: return "time";
        case MarkKind::Sign: return "sign";
    }
    return "?";
}

Mark Mark::time(double t) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("time mark must lie in (0,1)");
    return Mark{MarkKind::Time, t};
}

Mark Mark::sign(double s) {
    if (s != 1.0 && s != -1.0) throw std::invalid_argument("sign mark must be +1 or -1");
    return Mark{MarkKind::Sign, s};
}

PointConfiguration::PointConfiguration(std::size_t dim, MarkKind marks) : dim_(dim), mark_kind_(marks) {
    if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
}

void PointConfiguration::append_unchecked(std::span<const double> p, Mark m) {
    if (p.size() != dim_) throw std::invalid_argument("point dimension mismatch");
    check_finite(p);
    if (m.kind != mark_kind_) throw std::invalid_argument("mark variant mismatch");
    if (mark_kind_ == MarkKind::Time && !(m.value > 0.0 && m.value < 1.0))
        throw std::invalid_argument("time mark must lie in (0,1)");
    if (mark_kind_ == MarkKind::Sign && m.value != 1.0 && m.value != -1.0)
        throw std::invalid_argument("sign mark must be +1 or -1");
    coords_.insert(coords_.end(), p.begin(), p.end());
    if (mark_kind_ != MarkKind::None) marks_.push_back(m.value);
    ++n_;
}

bool PointConfiguration::contains_point(std::span<const double> p) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::equal(p.begin(), p.end(), point(i).begin())) return true;
    }
    return false;
}

std::optional<std::pair<std::size_t, std::size_t>> PointConfiguration::find_duplicate() const {
    const std::size_t n = size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (lex_less(point(a), point(b))) return true;
        if (lex_less(point(b), point(a))) return false;
        return a < b;
    });
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto a = point(order[i]), b = point(order[i + 1]);
        if (std::equal(a.begin(), a.end(), b.begin())) return std::make_pair(order[i], order[i + 1]);
    }
    return std::nullopt;
}

PointConfiguration restrict_to(const PointConfiguration& config, const Window& window) {
    if (config.dim() != window.dim()) throw std::invalid_argument("restrict: dimension mismatch");
    PointConfiguration out(config.dim(), config.mark_kind());
    const std::size_t n = config.size();
    for (std::size_t i = 0; i < n; ++i)
        if (window.contains(config.point(i))) out.append_unchecked(config.point(i), config.mark(i));
    return out;
}

PointConfiguration add_point(const PointConfiguration& config, std::span<const double> p, Mark m) {
    if (p.size() != config.dim()) throw std::invalid_argument("add_point: dimension mismatch");
    if (config.contains_point(p)) throw std::invalid_argument("add_point: duplicate point");
    PointConfiguration out = config;
    out.append_unchecked(p, m);
    return out;
}

static PointConfiguration sample_impl(const Region& region, double intensity, MarkKind marks, SeedState seed) {
    if (!(intensity > 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("intensity must be positive and finite");
    const double vol = region.volume();
    if (!(vol > 0.0) || !std::isfinite(vol)) throw std::invalid_argument("window volume must be positive and finite");
    Rng rng(seed);
    const long count = rng.poisson(intensity * vol);
    PointConfiguration out(region.dim(), marks);
    for (long i = 0; i < count; ++i) {
        Point p = rng.point_in(region);
        Mark m = Mark::none();
        if (marks == MarkKind::Time) m = Mark{MarkKind::Time, rng.uniform01_open()};
        if (marks == MarkKind::Sign) m = Mark{MarkKind::Sign, rng.rademacher()};
        out.append_unchecked(p, m);
    }
    return out;
}

PointConfiguration sample_poisson(const Region& region, double intensity, SeedState seed) {
    return sample_impl(region, intensity, MarkKind::None, seed);
}

PointConfiguration sample_marked_poisson(const Region& region, double intensity, MarkKind mark_variant,
                                         SeedState seed) {
    if (mark_variant == MarkKind::None)
        throw std::invalid_argument("sample_marked_poisson: mark variant must be time or sign");
    return sample_impl(region, intensity, mark_variant, seed);
}

}  // namespace stochgeo
