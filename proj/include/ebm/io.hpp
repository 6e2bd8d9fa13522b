#ifndef EBM_IO_HPP
#define EBM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace ebm::io {

/// Writes `bytes` to a sibling temp file, fsyncs it, then renames it over
/// `path`. Throws IoError with the path in the message on failure; a failed
/// write leaves no partial file behind.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void atomic_write(const std::filesystem::path& path, std::string_view text);

/// Whole-file read. Throws IoError if the file cannot be opened.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace ebm::io

#endif  // EBM_IO_HPP
