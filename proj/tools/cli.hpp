#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maxstable::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitConfig = 2;

/// Runs one command line; `args` excludes the program name. Data goes to `out`
/// when no --out file is given, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
[[nodiscard]] std::string file_digest(const std::string& path);

/// Path of the manifest written next to `output`.
[[nodiscard]] std::string manifest_path(const std::string& output);

}  // namespace maxstable::cli
