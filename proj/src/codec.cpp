#include "curator/codec.hpp"

#include "curator/errors.hpp"

#include <png.h>

#include <cstdio>
#include <jpeglib.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <memory>

namespace curator {

namespace {

bool is_png_signature(const unsigned char* sig, std::size_t n) {
    static const unsigned char kPng[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return n >= 8 && std::memcmp(sig, kPng, 8) == 0;
}

bool is_jpeg_signature(const unsigned char* sig, std::size_t n) {
    return n >= 2 && sig[0] == 0xFF && sig[1] == 0xD8;
}

RasterImage load_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw DecodeError("PNG decode failed: " + std::string(image.message));

    // The simplified libpng API reports >8-bit sources with the LINEAR flag
    // and any transparency (including palette tRNS) with the ALPHA flag.
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw UnsupportedDepth("PNG is not 8-bit: " + path.string());
    }
    if (image.format & PNG_FORMAT_FLAG_ALPHA) {
        png_image_free(&image);
        throw DecodeError("PNG has an alpha channel: " + path.string());
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height),
                    color ? 3 : 1);
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("PNG decode failed: " + msg);
    }
    return out;
}

struct JpegErrorCtx {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* ctx = reinterpret_cast<JpegErrorCtx*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, ctx->message);
    std::longjmp(ctx->jump, 1);
}

RasterImage load_jpeg(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw IoError("cannot open file: " + path.string());

    jpeg_decompress_struct cinfo;
    JpegErrorCtx err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        std::fclose(fp);
        throw DecodeError("JPEG decode failed: " + std::string(err.message));
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);

    if (cinfo.data_precision != 8) {
        jpeg_destroy_decompress(&cinfo);
        std::fclose(fp);
        throw UnsupportedDepth("JPEG is not 8-bit: " + path.string());
    }
    if (cinfo.num_components != 1 && cinfo.num_components != 3) {
        jpeg_destroy_decompress(&cinfo);
        std::fclose(fp);
        throw DecodeError("JPEG has unsupported component count: " + path.string());
    }
    const bool color = cinfo.num_components == 3;
    cinfo.out_color_space = color ? JCS_RGB : JCS_GRAYSCALE;

    jpeg_start_decompress(&cinfo);
    RasterImage out(static_cast<int>(cinfo.output_width),
                    static_cast<int>(cinfo.output_height), color ? 3 : 1);
    const std::size_t row_bytes =
        static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.pixels.data() + cinfo.output_scanline * row_bytes;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    std::fclose(fp);
    return out;
}

} // namespace

RasterImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), sizeof(sig));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    in.close();

    if (is_png_signature(sig, got)) return load_png(path);
    if (is_jpeg_signature(sig, got)) return load_jpeg(path);
    throw DecodeError("not a PNG or JPEG file: " + path.string());
}

void save_png(const RasterImage& img, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.pixels.data(),
                                 0, nullptr))
        throw IoError("PNG write failed: " + path.string() + " (" + image.message + ")");
}

void save_png(const GrayPlane& plane, const std::filesystem::path& path) {
    RasterImage img(plane.width, plane.height, 1);
    img.pixels = plane.pixels;
    save_png(img, path);
}

} // namespace curator
