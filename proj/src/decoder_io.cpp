#include "varimotion/decoder_io.hpp"

#include "varimotion/binio.hpp"
#include "varimotion/skinned_body.hpp"

#include <stdexcept>

namespace vmo {

namespace {
constexpr double kAffineKind = 0.0;
constexpr double kSkinnedKind = 1.0;
} // namespace

void save_decoder(BinaryWriter& writer, const Decoder& decoder) {
    if (const auto* affine = dynamic_cast<const AffineDecoder*>(&decoder)) {
        writer.scalar("decoder/kind", kAffineKind);
        affine->save_sections(writer);
        return;
    }
    if (const auto* skinned = dynamic_cast<const SkinnedBody*>(&decoder)) {
        writer.scalar("decoder/kind", kSkinnedKind);
        skinned->save_sections(writer);
        return;
    }
    throw std::runtime_error("cannot serialize this decoder type");
}

std::shared_ptr<Decoder> load_decoder(BinaryReader& reader) {
    const double kind = reader.scalar("decoder/kind");
    if (kind == kAffineKind) {
        return std::make_shared<AffineDecoder>(AffineDecoder::load_sections(reader));
    }
    if (kind == kSkinnedKind) {
        return std::make_shared<SkinnedBody>(SkinnedBody::load_sections(reader));
    }
    throw std::runtime_error("unknown decoder kind in container");
}

} // namespace vmo
