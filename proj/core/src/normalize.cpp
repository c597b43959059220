#include "gkae/normalize.hpp"

namespace gkae {

Matrix normalize(const Matrix& x, const NormStats& s) {
    Matrix out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = normalize(out.data()[i], s);
    return out;
}

Matrix denormalize(const Matrix& z, const NormStats& s) {
    Matrix out = z;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = denormalize(out.data()[i], s);
    return out;
}

}  // namespace gkae
