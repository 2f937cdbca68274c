#pragma once

#include <string>

#include "hitop/config.hpp"

namespace hitop {

// Downloads one dataset file from its mirror URL into dest_dir, verifying
// the sha256 when the entry carries one. Returns the path written.
// Gzipped payloads are stored as downloaded; the IDX loaders decompress
// transparently.
std::string fetch_dataset_file(const FetchEntry& entry, const std::string& dest_dir);

} // namespace hitop
