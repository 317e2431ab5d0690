#pragma once

#include <map>
#include <string>

#include "imblab/gbt.hpp"

namespace imblab {

/// Versioned JSON for one model. Doubles use shortest round-trip encoding,
/// so a deserialize/serialize cycle reproduces bit-identical predictions.
std::string model_to_json(const GbtModel& model);
GbtModel model_from_json(const std::string& text);

/// The four-model set in one document, with caller-supplied metadata fields
/// (target name, feature combo, ...) merged in at the top level.
std::string suite_to_json(const QuantileSuite& suite,
                          const std::map<std::string, std::string>& metadata = {});
QuantileSuite suite_from_json(const std::string& text);

} // namespace imblab
