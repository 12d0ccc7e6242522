#include "mlcs/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlcs {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

long parse_positive(const std::string& tok, const std::string& what) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit)) {
    throw FormatError("PGM header: bad " + what + " '" + tok + "'");
  }
  long v = std::stol(tok);
  if (v <= 0) throw FormatError("PGM header: " + what + " must be positive");
  return v;
}

}  // namespace

Image2D load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  if (header_token(in) != "P5") throw FormatError(path + ": not a binary PGM (P5)");
  const long width = parse_positive(header_token(in), "width");
  const long height = parse_positive(header_token(in), "height");
  const long maxval = parse_positive(header_token(in), "maxval");
  if (maxval > 65535) throw FormatError(path + ": maxval exceeds 65535");
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width * height * bytes));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw FormatError(path + ": truncated pixel data");
  }
  Image2D img(height, width);
  double* p = img.pixels.data();
  for (long i = 0; i < width * height; ++i) {
    const unsigned v = bytes == 1 ? raw[i] : (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1];
    if (v > static_cast<unsigned>(maxval)) throw FormatError(path + ": sample exceeds maxval");
    p[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return img;
}

void save_pgm(const Image2D& img, const std::string& path, int maxval) {
  if (maxval <= 0 || maxval > 65535) throw ParameterError("PGM maxval must be in [1, 65535]");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(img.size() * bytes));
  const double* p = img.pixels.data();
  for (Index i = 0; i < img.size(); ++i) {
    const double v = std::isfinite(p[i]) ? std::clamp(p[i], 0.0, 1.0) : 0.0;
    const auto q = static_cast<unsigned>(std::lround(v * maxval));
    if (bytes == 1) {
      raw[static_cast<std::size_t>(i)] = static_cast<unsigned char>(q);
    } else {
      raw[static_cast<std::size_t>(2 * i)] = static_cast<unsigned char>(q >> 8);
      raw[static_cast<std::size_t>(2 * i + 1)] = static_cast<unsigned char>(q & 0xff);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void save_npy(const std::string& path, const Signal& data, std::vector<Index> shape, bool complex) {
  Index count = 1;
  for (Index s : shape) count *= s;
  if (count != data.size()) throw DimensionError("npy shape does not match data length");
  std::ostringstream dict;
  dict << "{'descr': '" << (complex ? "<c16" : "<f8") << "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict << shape[i] << (shape.size() == 1 || i + 1 < shape.size() ? "," : "");
    if (i + 1 < shape.size()) dict << ' ';
  }
  dict << "), }";
  std::string header = dict.str();
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out << header;
  if (complex) {
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(Complex)));
  } else {
    std::vector<double> re(static_cast<std::size_t>(data.size()));
    for (Index i = 0; i < data.size(); ++i) re[static_cast<std::size_t>(i)] = data[i].real();
    out.write(reinterpret_cast<const char*>(re.data()),
              static_cast<std::streamsize>(re.size() * sizeof(double)));
  }
}

Signal load_npy(const std::string& path, std::vector<Index>* shape_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[10];
  in.read(magic, 10);
  if (in.gcount() != 10 || std::memcmp(magic, "\x93NUMPY", 6) != 0 || magic[6] != 1) {
    throw FormatError(path + ": not a v1 npy file");
  }
  const std::size_t hlen = static_cast<unsigned char>(magic[8]) |
                           (static_cast<std::size_t>(static_cast<unsigned char>(magic[9])) << 8);
  std::string header(hlen, '\0');
  in.read(header.data(), static_cast<std::streamsize>(hlen));
  const bool complex = header.find("'<c16'") != std::string::npos;
  if (!complex && header.find("'<f8'") == std::string::npos) {
    throw FormatError(path + ": unsupported dtype");
  }
  const auto open = header.find('(');
  const auto close = header.find(')');
  if (open == std::string::npos || close == std::string::npos) throw FormatError(path + ": bad shape");
  std::vector<Index> shape;
  std::stringstream dims(header.substr(open + 1, close - open - 1));
  std::string item;
  Index count = 1;
  while (std::getline(dims, item, ',')) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    shape.push_back(std::stol(item));
    count *= shape.back();
  }
  Signal data(count);
  if (complex) {
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(Complex)));
  } else {
    std::vector<double> re(static_cast<std::size_t>(count));
    in.read(reinterpret_cast<char*>(re.data()), static_cast<std::streamsize>(count * sizeof(double)));
    for (Index i = 0; i < count; ++i) data[i] = re[static_cast<std::size_t>(i)];
  }
  if (!in) throw FormatError(path + ": truncated data");
  if (shape_out) *shape_out = shape;
  return data;
}

}  // namespace mlcs
