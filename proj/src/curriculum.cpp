#include "curla/curriculum.hpp"

namespace curla {

VariantKind parse_variant(const std::string& name) {
  if (name == "sca") return VariantKind::Sca;
  if (name == "onefold") return VariantKind::OneFoldCl;
  if (name == "curla") return VariantKind::CuRla;
  throw std::invalid_argument("unknown variant '" + name +
                              "' (expected sca|onefold|curla)");
}

std::string variant_name(VariantKind kind) {
  switch (kind) {
    case VariantKind::Sca: return "sca";
    case VariantKind::OneFoldCl: return "onefold";
    case VariantKind::CuRla: return "curla";
  }
  return "curla";
}

}  // namespace curla
