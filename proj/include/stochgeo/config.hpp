#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stochgeo/geometry.hpp"
#include "stochgeo/rng.hpp"

namespace stochgeo {

enum class MarkKind { None, Time, Sign };

std::string mark_kind_name(MarkKind k);

/// Optional mark attached to a point: nothing, an arrival time in (0,1), or a
/// sign in {-1,+1}.
struct Mark {
    MarkKind kind = MarkKind::None;
    double value = 0.0;

    static Mark none() { return {}; }
    static Mark time(double t);
    static Mark sign(double s);
};

/// A finite point set in R^d with one shared mark variant. Immutable after
/// construction; every operation below returns a new configuration.
///
/// Constructors accept point sets with coordinate ties (hand-built tests use
/// them); samplers never produce ties, and graph algorithms break ties by
/// lexicographic point order.
class PointConfiguration {
public:
    PointConfiguration() = default;
    explicit PointConfiguration(std::size_t dim, MarkKind marks = MarkKind::None);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return n_; }
    bool empty() const { return size() == 0; }
    MarkKind mark_kind() const { return mark_kind_; }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    double mark_value(std::size_t i) const { return mark_kind_ == MarkKind::None ? 0.0 : marks_[i]; }
    Mark mark(std::size_t i) const { return Mark{mark_kind_, mark_value(i)}; }
    const std::vector<double>& flat_coords() const { return coords_; }

    Point point_copy(std::size_t i) const { return Point(point(i).begin(), point(i).end()); }

    /// Appends without the duplicate check; used by samplers and internal code
    /// that guarantees distinctness by construction.
    void append_unchecked(std::span<const double> p, Mark m);

    bool contains_point(std::span<const double> p) const;

    /// Index of the first duplicate coordinate pair, if any.
    std::optional<std::pair<std::size_t, std::size_t>> find_duplicate() const;

private:
    std::size_t dim_ = 0;
    std::size_t n_ = 0;
    MarkKind mark_kind_ = MarkKind::None;
    std::vector<double> coords_;
    std::vector<double> marks_;
};

/// Points of `config` inside `window`, marks and relative order preserved.
PointConfiguration restrict_to(const PointConfiguration& config, const Window& window);

/// Configuration with p appended. Throws on an exact duplicate or a mark
/// variant mismatch.
PointConfiguration add_point(const PointConfiguration& config, std::span<const double> p, Mark m);

/// Homogeneous Poisson sample on a bounded window: count ~ Poisson(intensity
/// * volume), positions i.i.d. uniform, no marks.
PointConfiguration sample_poisson(const Region& region, double intensity, SeedState seed);

/// As sample_poisson, with i.i.d. marks independent of positions: uniform
/// (0,1) times or Rademacher signs.
PointConfiguration sample_marked_poisson(const Region& region, double intensity, MarkKind mark_variant,
                                         SeedState seed);

}  // namespace stochgeo
