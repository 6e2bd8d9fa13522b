#ifndef EBM_PERSISTENCE_HPP
#define EBM_PERSISTENCE_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "ebm/dbn.hpp"
#include "ebm/rbm.hpp"
#include "ebm/variants.hpp"

namespace ebm {

using AnyModel = std::variant<Rbm, DropoutRbm, GaussianRbm, SigmoidRbm, Dbn>;

/// Model file layout (all multi-byte integers little-endian):
///
///   offset 0   5 bytes   magic "EBML1"
///   offset 5   u32       header_len
///   offset 9   header    UTF-8 JSON, header_len bytes
///   then       payload   concatenated tensors, f64 little-endian, row-major
///
/// The header records "version", "kind" (rbm, dropout-rbm, gaussian-rbm,
/// sigmoid-rbm, dbn), hyperparameters, Rng states, training history and a
/// "tensors" manifest of {name, rows, cols, offset}, where offset is the byte
/// offset into the payload. Vectors are stored as rows x 1.
///
/// Epoch wall-clock times are not persisted (they load as 0) so that two
/// identical training runs produce identical files.
inline constexpr std::string_view kModelMagic = "EBML1";

std::string_view model_kind(const AnyModel& model);

/// Serializes to bytes / writes atomically (temp file, fsync, rename).
std::vector<std::uint8_t> encode_model(const AnyModel& model);
void save(const AnyModel& model, const std::filesystem::path& path);

/// Throws FormatError for a malformed file and UnsupportedVersion for an
/// unknown version or model kind. Never returns a partially built model.
AnyModel decode_model(std::span<const std::uint8_t> bytes);
AnyModel load(const std::filesystem::path& path);

/// The JSON header of a model file, pretty-printed.
std::string read_header(const std::filesystem::path& path);

}  // namespace ebm

#endif  // EBM_PERSISTENCE_HPP
