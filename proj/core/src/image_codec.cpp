#include "mlep/image_codec.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "mlep/error.hpp"
#include "mlep/file_util.hpp"

namespace mlep {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

[[noreturn]] void decode_fail(const std::string& stage, const std::string& detail) {
  throw Error(ErrorCode::kDecode, stage + ": " + detail);
}

// --- PNG -------------------------------------------------------------------

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

// Samples are taken as stored: no gamma or colour-space conversion. 16-bit
// samples are scaled to 8 bits, palettes and low bit depths are expanded,
// alpha is dropped.
struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 8;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  char message[256] = "corrupt stream";
  const char* stage = "png header";
  ~PngReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(st->message, sizeof st->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->bytes.size() - st->offset < n) png_error(png, "truncated stream");
  std::memcpy(out, st->bytes.data() + st->offset, n);
  st->offset += n;
}

bool run_png_decode(PngReadState* st, int* channels) {
  if (setjmp(png_jmpbuf(st->png))) return false;
  png_set_read_fn(st->png, st, png_read_fn);
  png_set_sig_bytes(st->png, 8);
  png_read_info(st->png, st->info);
  const png_byte color = png_get_color_type(st->png, st->info);
  const png_byte depth = png_get_bit_depth(st->png, st->info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(st->png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(st->png);
  if (depth == 16) png_set_scale_16(st->png);
  png_set_strip_alpha(st->png);
  png_read_update_info(st->png, st->info);
  *channels = png_get_channels(st->png, st->info);
  const auto h = png_get_image_height(st->png, st->info);
  const auto w = png_get_image_width(st->png, st->info);
  if (h < 2 || w < 2) png_error(st->png, "image smaller than 2x2");
  if (h > 1u << 16 || w > 1u << 16) png_error(st->png, "image larger than 65536 pixels per side");
  st->stage = "png pixels";
  const std::size_t row = png_get_rowbytes(st->png, st->info);
  st->pixels.resize(row * h);
  st->rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) st->rows[y] = st->pixels.data() + row * y;
  png_read_image(st->png, st->rows.data());
  png_read_end(st->png, nullptr);
  return true;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  auto st = std::make_unique<PngReadState>();
  st->bytes = bytes;
  st->png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st.get(), png_error_fn, png_warning_fn);
  if (st->png) st->info = png_create_info_struct(st->png);
  if (!st->png || !st->info) decode_fail("png header", "out of memory");
  int channels = 0;
  if (!run_png_decode(st.get(), &channels)) decode_fail(st->stage, st->message);
  const auto h = static_cast<int>(png_get_image_height(st->png, st->info));
  const auto w = static_cast<int>(png_get_image_width(st->png, st->info));
  return RasterImage::from_interleaved(h, w, channels, st->pixels);
}

// --- JPEG ------------------------------------------------------------------

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr) {}

// All state that must survive a longjmp lives on the heap and is owned by
// the caller; nothing with a non-trivial destructor is constructed between
// setjmp and the libjpeg calls.
struct JpegState {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  std::vector<std::uint8_t> pixels;
  const char* stage = "jpeg header";
  bool created = false;
  ~JpegState() {
    if (created) jpeg_destroy_decompress(&cinfo);
  }
};

bool run_jpeg_decode(JpegState* st, const std::uint8_t* data, std::size_t size) {
  st->cinfo.err = jpeg_std_error(&st->err.pub);
  st->err.pub.error_exit = jpeg_error_exit;
  st->err.pub.output_message = jpeg_silent;
  if (setjmp(st->err.jump)) return false;

  jpeg_create_decompress(&st->cinfo);
  st->created = true;
  jpeg_mem_src(&st->cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&st->cinfo, TRUE);
  st->stage = "jpeg start";
  st->cinfo.out_color_space =
      st->cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&st->cinfo);
  st->stage = "jpeg scanlines";
  const std::size_t row = static_cast<std::size_t>(st->cinfo.output_width) *
                          st->cinfo.output_components;
  st->pixels.resize(row * st->cinfo.output_height);
  while (st->cinfo.output_scanline < st->cinfo.output_height) {
    JSAMPROW ptr = st->pixels.data() + row * st->cinfo.output_scanline;
    jpeg_read_scanlines(&st->cinfo, &ptr, 1);
  }
  st->stage = "jpeg finish";
  jpeg_finish_decompress(&st->cinfo);
  return true;
}

RasterImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  auto st = std::make_unique<JpegState>();
  if (!run_jpeg_decode(st.get(), bytes.data(), bytes.size())) {
    decode_fail(st->stage, st->err.message);
  }
  const auto h = static_cast<int>(st->cinfo.output_height);
  const auto w = static_cast<int>(st->cinfo.output_width);
  const int c = st->cinfo.output_components;
  if (h < 2 || w < 2) decode_fail("jpeg header", "image smaller than 2x2");
  return RasterImage::from_interleaved(h, w, c, st->pixels);
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  decode_fail("signature", "not a PNG or JPEG stream");
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width());
  png.image.height = static_cast<png_uint_32>(img.height());
  png.image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::vector<std::uint8_t> hwc = img.to_interleaved();

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, hwc.data(), 0, nullptr)) {
    throw Error(ErrorCode::kEncode, std::string("png size: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, hwc.data(), 0, nullptr)) {
    throw Error(ErrorCode::kEncode, std::string("png write: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

RasterImage read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw e.with_stage(path.string());
  }
}

}  // namespace mlep
