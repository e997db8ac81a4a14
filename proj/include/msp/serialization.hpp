#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "msp/block_system.hpp"
#include "msp/errors.hpp"
#include "msp/matrix_market.hpp"

namespace msp {

// Writes manifest.json plus one MatrixMarket file per block. Banded blocks are
// densified on the way out; this is a desk-scale exchange format, not a
// database.
inline void save_system(const BlockSaddleSystem& sys,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["k"] = sys.k();
  manifest["sizes"] = sys.sizes();
  std::vector<std::string> diag_files, coupling_files;
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const std::string name = "a" + std::to_string(j) + ".mtx";
    write_matrix_market_file(dir / name, sys.a(j).to_dense(), /*symmetric=*/true);
    diag_files.push_back(name);
  }
  for (std::size_t j = 1; j <= sys.k(); ++j) {
    const std::string name = "b" + std::to_string(j) + ".mtx";
    write_matrix_market_file(dir / name, sys.b(j).to_dense(), /*symmetric=*/false);
    coupling_files.push_back(name);
  }
  manifest["diagonal"] = diag_files;
  manifest["coupling"] = coupling_files;
  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error("cannot write manifest in " + dir.string());
  os << manifest.dump(2) << "\n";
}

inline BlockSaddleSystem load_system(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw Error("cannot read manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    is >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
  if (!manifest.contains("k") || !manifest.contains("diagonal") ||
      !manifest.contains("coupling"))
    throw ParseError("manifest missing required keys");
  const auto diag_files = manifest["diagonal"].get<std::vector<std::string>>();
  const auto coupling_files = manifest["coupling"].get<std::vector<std::string>>();
  const std::size_t k = manifest["k"].get<std::size_t>();
  if (diag_files.size() != k + 1 || coupling_files.size() != k)
    throw ParseError("manifest block counts do not match k");
  std::vector<Block> diag, coupling;
  for (const auto& name : diag_files) {
    DenseMatrix m = read_matrix_market_file(dir / name);
    diag.push_back(m.max_abs() == 0.0 ? Block::zero(m.rows(), m.cols())
                                      : Block::dense(std::move(m)));
  }
  for (const auto& name : coupling_files)
    coupling.push_back(Block::dense(read_matrix_market_file(dir / name)));
  return BlockSaddleSystem(std::move(diag), std::move(coupling));
}

}  // namespace msp
