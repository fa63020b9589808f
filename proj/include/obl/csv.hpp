#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "obl/benchfn.hpp"
#include "obl/opposition.hpp"

namespace obl {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Header `x1[,x2],y`, one row per sample.
void write_dataset_csv(std::ostream& out, const Dataset& d);
/// Without a box, the bounding box of the inputs is used.
Dataset read_dataset_csv(std::istream& in, const std::optional<DomainBox>& box = std::nullopt);

/// Header `x1[,x2],ox1[,ox2],y,target_y,achieved_y,fallback`, input order.
void write_mined_csv(std::ostream& out, const MinedSet& m);
MinedSet read_mined_csv(std::istream& in, const std::optional<DomainBox>& box = std::nullopt,
                        OppositionScheme scheme = OppositionScheme::kT1);

/// Bounding box of a set of points; throws UsageError if any axis is flat.
DomainBox bounding_box(std::span<const Point> xs);

}  // namespace obl
