#include <fstream>

#include "binary_io.hpp"
#include "towe/model.hpp"

namespace towe {

void save_checkpoint(const Parameters& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write checkpoint " + path.string());
  out.write("TOWE", 4);
  detail::write_le<std::uint32_t>(out, kCheckpointVersion);
  params.for_each([&out](std::string_view, const Matrix& m) {
    detail::write_le(out, static_cast<std::uint32_t>(m.rows()));
    detail::write_le(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) detail::write_f64(out, m(r, c));
    }
  });
  if (!out) throw ModelError("failed writing checkpoint " + path.string());
}

Parameters load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open checkpoint " + path.string());
  if (!detail::read_magic(in, "TOWE")) throw ModelError(path.string() + " is not a TOWE checkpoint");
  std::uint32_t version = 0;
  if (!detail::read_le(in, version) || version != kCheckpointVersion) {
    throw ModelError("unsupported checkpoint version in " + path.string());
  }
  Parameters params;
  params.for_each([&](std::string_view name, Matrix& m) {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    if (!detail::read_le(in, rows) || !detail::read_le(in, cols)) {
      throw ModelError("truncated checkpoint at " + std::string(name));
    }
    m.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        if (!detail::read_f64(in, m(r, c))) throw ModelError("truncated checkpoint at " + std::string(name));
      }
    }
  });
  if (in.peek() != std::char_traits<char>::eof()) throw ModelError("trailing bytes in checkpoint");
  infer_hyperparameters(params);  // validates shapes
  return params;
}

}  // namespace towe
