#include "fundusml/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace fundusml {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(std::FILE* fp, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(ImageError::Kind::CorruptData, "png init failed: " + path);
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageError(ImageError::Kind::CorruptData, "corrupt PNG: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    int ch = png_get_channels(png, info);
    Image img(static_cast<int>(w), static_cast<int>(h), ch == 1 ? 1 : 3);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 r = 0; r < h; ++r)
        rows[r] = img.data.data() + static_cast<std::size_t>(r) * w * img.channels;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

Image load_jpeg(std::FILE* fp, const std::string& path) {
    jpeg_decompress_struct cinfo{};
    JpegErrorMgr err{};
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw ImageError(ImageError::Kind::CorruptData, "corrupt JPEG: " + path);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    Image img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height),
              cinfo.output_components == 1 ? 1 : 3);
    std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.data.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

} // namespace

Image load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw ImageError(ImageError::Kind::FileNotFound, "file not found: " + path);

    unsigned char magic[8] = {};
    std::size_t got = std::fread(magic, 1, sizeof magic, fp.get());
    std::rewind(fp.get());
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (got >= 8 && std::equal(png_sig, png_sig + 8, magic))
        return load_png(fp.get(), path);
    if (got >= 2 && magic[0] == 0xff && magic[1] == 0xd8)
        return load_jpeg(fp.get(), path);
    throw ImageError(ImageError::Kind::UnsupportedFormat, "not a PNG or JPEG file: " + path);
}

Image resize(const Image& img, int target_w, int target_h) {
    if (target_w < 1 || target_h < 1)
        throw ImageError(ImageError::Kind::BadArgument, "resize target must be >= 1");
    if (target_w == img.width && target_h == img.height) return img;

    Image out(target_w, target_h, img.channels);
    // pixel-centers-aligned mapping: out center (x+0.5) -> in (x+0.5)*scale
    double sx = static_cast<double>(img.width) / target_w;
    double sy = static_cast<double>(img.height) / target_h;
    for (int y = 0; y < target_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = fy - y0;
        for (int x = 0; x < target_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = fx - x0;
            for (int c = 0; c < img.channels; ++c) {
                double top = img.at(y0, x0, c) * (1 - wx) + img.at(y0, x1, c) * wx;
                double bot = img.at(y1, x0, c) * (1 - wx) + img.at(y1, x1, c) * wx;
                double v = top * (1 - wy) + bot * wy;
                out.at(y, x, c) = static_cast<std::uint8_t>(
                    std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

Image to_grayscale(const Image& img) {
    if (img.channels != 3)
        throw ImageError(ImageError::Kind::BadArgument, "to_grayscale needs a 3-channel image");
    Image out(img.width, img.height, 1);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        double v = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                   0.114 * img.data[3 * i + 2];
        out.data[i] = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
    return out;
}

ChannelSet split_channels(const Image& img) {
    if (img.channels != 3)
        throw ImageError(ImageError::Kind::BadArgument, "split_channels needs a 3-channel image");
    ChannelSet cs{to_grayscale(img), Image(img.width, img.height, 1),
                  Image(img.width, img.height, 1), Image(img.width, img.height, 1)};
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        cs.red.data[i] = img.data[3 * i];
        cs.green.data[i] = img.data[3 * i + 1];
        cs.blue.data[i] = img.data[3 * i + 2];
    }
    return cs;
}

} // namespace fundusml
