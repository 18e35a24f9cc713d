#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <vector>

#include "boxl0/error.hpp"
#include "boxl0/pgm_image.hpp"

namespace boxl0 {
namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

std::size_t header_number(std::istream& in, const std::string& path) {
  const std::string tok = header_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    throw Error(ErrorCode::Io, path + ": malformed PGM header");
  }
  return std::stoul(tok);
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path + ": cannot open");
  if (header_token(in) != "P5") throw Error(ErrorCode::Io, path + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = header_number(in, path);
  img.height = header_number(in, path);
  const std::size_t maxval = header_number(in, path);
  if (img.width == 0 || img.height == 0 || maxval == 0 || maxval > 255) {
    throw Error(ErrorCode::Io, path + ": unsupported PGM dimensions or maxval");
  }
  std::vector<unsigned char> raw(img.width * img.height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw Error(ErrorCode::Io, path + ": truncated pixel data");
  img.pixels.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
  return img;
}

void write_pgm(const std::string& path, const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) throw Error(ErrorCode::BadShape, "pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path + ": cannot write");
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> raw(image.pixels.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(image.pixels[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorCode::Io, path + ": write failed");
}

}  // namespace boxl0
