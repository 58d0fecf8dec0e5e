#include <png.h>

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "sparsescan/raster.hpp"

namespace sparsescan {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

[[noreturn]] void malformed(const fs::path& path, const std::string& why) {
  throw FormatError("malformed header in '" + path.string() + "': " + why);
}

// Netpbm header tokenizer: whitespace separated, '#' comments to end of line.
class NetpbmHeader {
 public:
  NetpbmHeader(const std::string& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  int next_int(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      malformed(path_, std::string("expected ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000L) malformed(path_, std::string(field) + " too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      malformed(path_, "missing whitespace before payload");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

Image decode_pgm(const std::string& bytes, const fs::path& path) {
  NetpbmHeader header(bytes, path);
  header.skip(2);
  const int width = header.next_int("width");
  const int height = header.next_int("height");
  const int maxval = header.next_int("maxval");
  if (maxval != 255) {
    throw FormatError("unsupported bit depth in '" + path.string() + "': maxval " +
                      std::to_string(maxval) + " (only 8-bit, maxval 255, is supported)");
  }
  const std::size_t offset = header.payload_offset();
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (bytes.size() - offset < n) throw FormatError("truncated PGM payload in '" + path.string() + "'");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = static_cast<unsigned char>(bytes[offset + i]) / 255.0;
  }
  return Image(width, height, std::move(values));
}

Image decode_png(const fs::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    const std::string why = png.message;
    png_image_free(&png);
    throw FormatError("malformed PNG '" + path.string() + "': " + why);
  }
  if (png.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_COLORMAP)) {
    png_image_free(&png);
    throw FormatError("unsupported color type in '" + path.string() + "': only grayscale is supported");
  }
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw FormatError("unsupported bit depth in '" + path.string() + "': 16-bit PNG");
  }
  png.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw FormatError("malformed PNG '" + path.string() + "': " + why);
  }
  std::vector<double> values(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) values[i] = buffer[i] / 255.0;
  return Image(static_cast<int>(png.width), static_cast<int>(png.height), std::move(values));
}

void encode_png(const Image& image, const fs::path& path) {
  std::vector<png_byte> buffer(image.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = quantize_byte(image[i]);
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw IoError("cannot write PNG '" + path.string() + "': " + why);
  }
}

const std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace

Image load_image(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
  const std::string bytes = read_file(path);
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) return decode_png(path);
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] == '5') return decode_pgm(bytes, path);
    if (bytes[1] >= '1' && bytes[1] <= '7') {
      throw FormatError("unsupported color or encoding in '" + path.string() + "': P" +
                        std::string(1, bytes[1]) + " (only P5 grayscale is supported)");
    }
  }
  malformed(path, "neither P5 PGM nor PNG");
}

void save_image(const Image& image, const fs::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".png") {
    encode_png(image, path);
    return;
  }
  std::string bytes = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  bytes.reserve(bytes.size() + image.size());
  for (double v : image.values()) bytes.push_back(static_cast<char>(quantize_byte(v)));
  write_file(path, bytes);
}

// ---- EMAP -----------------------------------------------------------------

ErrorMap read_emap(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
  const std::string bytes = read_file(path);
  const auto eol = bytes.find('\n');
  if (bytes.rfind("EMAP ", 0) != 0 || eol == std::string::npos) {
    throw FormatError("bad magic in '" + path.string() + "': expected 'EMAP <width> <height>'");
  }
  std::istringstream header(bytes.substr(5, eol - 5));
  long width = -1;
  long height = -1;
  std::string trailing;
  if (!(header >> width >> height) || (header >> trailing) || width < 0 || height < 0) {
    throw FormatError("bad EMAP header in '" + path.string() + "'");
  }
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t payload = bytes.size() - eol - 1;
  if (payload != n * 4) {
    std::ostringstream os;
    os << "size mismatch in '" << path.string() << "': header declares " << width << "x" << height
       << " (" << n * 4 << " bytes) but payload has " << payload << " bytes";
    throw FormatError(os.str());
  }
  std::vector<double> values(n);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + eol + 1);
  for (std::size_t i = 0; i < n; ++i, p += 4) {
    const std::uint32_t word = std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 |
                               std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
    const float f = std::bit_cast<float>(word);
    if (std::isnan(f)) {
      throw FormatError("NaN in EMAP payload of '" + path.string() + "' at index " + std::to_string(i));
    }
    values[i] = f;
  }
  try {
    return ErrorMap(static_cast<int>(width), static_cast<int>(height), std::move(values));
  } catch (const ValidationError& e) {
    throw FormatError("invalid EMAP payload in '" + path.string() + "': " + e.what());
  }
}

void write_emap(const RasterView& map, const fs::path& path) {
  std::string bytes = "EMAP " + std::to_string(map.width) + " " + std::to_string(map.height) + "\n";
  bytes.reserve(bytes.size() + map.size() * 4);
  for (double v : map.values) {
    const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<char>((word >> s) & 0xffu));
  }
  write_file(path, bytes);
}

void write_emap(const ErrorMap& map, const fs::path& path) { write_emap(map.view(), path); }

// ---- PBM P4 ---------------------------------------------------------------

void bitmap_to_pbm(const Bitmap& bitmap, const fs::path& path) {
  const int w = bitmap.width();
  const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
  std::string bytes = "P4\n" + std::to_string(w) + " " + std::to_string(bitmap.height()) + "\n";
  const std::size_t header = bytes.size();
  bytes.resize(header + row_bytes * bitmap.height(), '\0');
  for (int r = 0; r < bitmap.height(); ++r) {
    for (int c = 0; c < w; ++c) {
      if (bitmap.test(r, c)) {
        bytes[header + r * row_bytes + c / 8] |= static_cast<char>(0x80u >> (c % 8));
      }
    }
  }
  write_file(path, bytes);
}

Bitmap pbm_to_bitmap(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
  const std::string bytes = read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '4') malformed(path, "expected P4 magic");
  NetpbmHeader header(bytes, path);
  header.skip(2);
  const int width = header.next_int("width");
  const int height = header.next_int("height");
  const std::size_t offset = header.payload_offset();
  const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
  if (bytes.size() - offset < row_bytes * height) {
    throw FormatError("truncated PBM payload in '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto byte = static_cast<unsigned char>(bytes[offset + r * row_bytes + c / 8]);
      bits[static_cast<std::size_t>(r) * width + c] = (byte >> (7 - c % 8)) & 1u;
    }
  }
  return Bitmap(width, height, std::move(bits));
}

}  // namespace sparsescan
