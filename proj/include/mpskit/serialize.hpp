#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpskit/activated.hpp"
#include "mpskit/flatten.hpp"
#include "mpskit/mps.hpp"
#include "mpskit/truth_table.hpp"

namespace mpskit {

// MPS document: JSON with version, boundary, label site, per-site dims plus
// row-major data, and the feature-map descriptors. Number formatting uses
// shortest round-trip form, so integer-valued tensors serialize bit-exactly.
std::string save_mps(const Mps& mps, const std::vector<FeatureMap>& fms);

struct LoadedMps {
    Mps mps;
    std::vector<FeatureMap> fms;
};
LoadedMps load_mps(const std::string& text);

std::string save_activated(const ActivatedMps& a);
ActivatedMps load_activated(const std::string& text);

// Accepts either document kind and wraps plain MPS as needed.
ActivatedMps load_activated_or_wrap(const std::string& text,
                                    const ScaleInvariantSigmoid& fallback_sigma);

std::string save_flat(const FlatNetwork& f, bool include_monomials);

// Truth-table file: header "n=<arity>", then 2^n lines "bits output"
// (X1 first) or a single "hex=<digits>" line, row 0 in the top nibble bit.
std::string save_table(const TruthTable& t);
TruthTable load_table(const std::string& text);

// Declarative key=value config ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_config(const std::string& text);
std::vector<std::string> split_list(const std::string& value);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mpskit
