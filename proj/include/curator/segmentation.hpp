#ifndef CURATOR_SEGMENTATION_HPP
#define CURATOR_SEGMENTATION_HPP

#include "curator/image.hpp"
#include "curator/morphology.hpp"

#include <cstdint>
#include <filesystem>

namespace curator {

/// Otsu's global threshold: the t in [0, 255] maximizing the between-class
/// variance w0(t) * w1(t) * (mu0(t) - mu1(t))^2 with classes {<= t} and
/// {> t}. Comparison is exact (integer arithmetic) for planes up to ~400k
/// pixels, long double beyond that. Ties break to the smallest t. Throws
/// DegeneratePlane when all pixels are equal.
std::uint8_t otsu_threshold(const GrayPlane& plane);

/// Which side of the threshold is foreground. Dermoscopic lesions are darker
/// than the surrounding skin, so ForegroundDark is the default everywhere.
enum class Polarity { ForegroundDark, ForegroundBright };

/// ForegroundDark keeps intensities <= t; ForegroundBright keeps >= t.
BinaryMask apply_threshold(const GrayPlane& plane, std::uint8_t t,
                           Polarity polarity = Polarity::ForegroundDark);

/// A single 8-connected foreground component with its tight bounding box
/// (inclusive pixel bounds).
struct RegionOfInterest {
    BinaryMask mask;
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;
    std::size_t area = 0;    // component pixel count
    std::size_t contour = 0; // Moore-traced boundary pixel count
};

/// Picks the component with the longest Moore-neighbor boundary contour;
/// ties go to the larger area, then the smallest (y_min, x_min). Throws
/// EmptyMask when no foreground pixel exists.
RegionOfInterest largest_component_roi(const BinaryMask& mask);

struct SegmentationConfig {
    DenoiseParams denoise;
    Channel channel = Channel::G;
    Polarity polarity = Polarity::ForegroundDark;
    StructuringElement mask_close_se = StructuringElement::square(2);
};

/// Every intermediate product of the segmentation pipeline, kept for debug
/// output and for the spatial statistics (which read the denoised channel).
struct SegmentationProduct {
    RasterImage denoised;
    GrayPlane channel;
    std::uint8_t threshold = 0;
    BinaryMask mask;
    RegionOfInterest roi;
};

/// denoise -> extract configured channel -> otsu -> threshold -> close ->
/// largest-contour component. Requires a 3-channel image; propagates
/// DegeneratePlane / EmptyMask for unsegmentable frames.
SegmentationProduct segment_lesion_detail(const RasterImage& img,
                                          const SegmentationConfig& cfg = {});
RegionOfInterest segment_lesion(const RasterImage& img,
                                const SegmentationConfig& cfg = {});

/// Writes <stem>.mask.png and <stem>.roi.png, plus <stem>.denoised.png when
/// debug is set.
void write_segmentation_outputs(const SegmentationProduct& product,
                                const std::filesystem::path& stem, bool debug);

} // namespace curator

#endif // CURATOR_SEGMENTATION_HPP
