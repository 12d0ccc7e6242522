#pragma once

#include <string>

#include "mlcs/core.hpp"

namespace mlcs {

enum class PhantomKind {
  Glpu,   ///< piecewise-constant head phantom: ellipses of constant intensity
  Scene,  ///< piecewise-smooth scene: smooth shading inside sharp-edged shapes
};

PhantomKind phantom_kind_from_string(const std::string& name);
std::string to_string(PhantomKind k);

/// Renders the phantom on a side x side grid over [-1, 1]^2, averaging
/// supersample^2 point samples per pixel. Values lie in [0, 1].
Image2D make_phantom(PhantomKind kind, Index side, int supersample = 4);

/// "phantom:glpu", "phantom:scene", or a path to a binary PGM. PGM input must
/// already be side x side.
Image2D load_image_source(const std::string& source, Index side);

}  // namespace mlcs
