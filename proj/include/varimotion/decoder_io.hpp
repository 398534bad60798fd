#pragma once

#include "varimotion/latent.hpp"

#include <memory>

namespace vmo {

class BinaryWriter;
class BinaryReader;

// Tagged polymorphic decoder serialization: a "decoder/kind" scalar followed
// by the concrete type's own sections. Supported kinds: AffineDecoder,
// SkinnedBody.
void save_decoder(BinaryWriter& writer, const Decoder& decoder);
std::shared_ptr<Decoder> load_decoder(BinaryReader& reader);

} // namespace vmo
