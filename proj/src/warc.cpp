#include "localmine/warc.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "localmine/crawler.hpp"
#include "localmine/error.hpp"

namespace localmine {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

void rstrip(std::string& s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
}

}  // namespace

WarcReader::WarcReader(const std::string& path) {
  gz_ = gzopen(path.c_str(), "rb");
  if (!gz_) throw FatalError("cannot open archive " + path);
}

WarcReader::~WarcReader() {
  if (gz_) gzclose(static_cast<gzFile>(gz_));
}

bool WarcReader::read_line(std::string& line) {
  line.clear();
  for (;;) {
    if (pos_ >= buf_.size()) {
      if (eof_) return !line.empty();
      buf_.resize(1 << 16);
      const int n = gzread(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size()));
      if (n <= 0) {
        eof_ = true;
        buf_.clear();
        pos_ = 0;
        return !line.empty();
      }
      buf_.resize(static_cast<std::size_t>(n));
      pos_ = 0;
    }
    const auto nl = buf_.find('\n', pos_);
    if (nl == std::string::npos) {
      line.append(buf_, pos_, std::string::npos);
      pos_ = buf_.size();
    } else {
      line.append(buf_, pos_, nl + 1 - pos_);
      pos_ = nl + 1;
      return true;
    }
  }
}

bool WarcReader::read_exact(std::size_t n, std::string& out) {
  out.clear();
  while (out.size() < n) {
    if (pos_ >= buf_.size()) {
      if (eof_) return false;
      buf_.resize(1 << 16);
      const int got = gzread(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size()));
      if (got <= 0) {
        eof_ = true;
        buf_.clear();
        pos_ = 0;
        return false;
      }
      buf_.resize(static_cast<std::size_t>(got));
      pos_ = 0;
    }
    const std::size_t take = std::min(n - out.size(), buf_.size() - pos_);
    out.append(buf_, pos_, take);
    pos_ += take;
  }
  return true;
}

bool WarcReader::next(ArchiveRecord& record) {
  std::string line;
  while (!malformed_) {
    do {
      if (!read_line(line)) return false;
      rstrip(line);
    } while (line.empty());
    if (line.rfind("WARC/", 0) != 0) {
      malformed_ = true;
      return false;
    }
    std::string type;
    std::string uri;
    long long length = -1;
    for (;;) {
      if (!read_line(line)) {
        malformed_ = true;
        return false;
      }
      rstrip(line);
      if (line.empty()) break;
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = lower(line.substr(0, colon));
      std::string value = line.substr(colon + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      if (key == "warc-type") type = lower(value);
      else if (key == "warc-target-uri") uri = value;
      else if (key == "content-length") length = std::atoll(value.c_str());
    }
    if (length < 0) {
      malformed_ = true;
      return false;
    }
    std::string block;
    if (!read_exact(static_cast<std::size_t>(length), block)) {
      malformed_ = true;
      return false;
    }
    if (uri.size() >= 2 && uri.front() == '<' && uri.back() == '>') uri = uri.substr(1, uri.size() - 2);
    if (type == "response") {
      auto sep = block.find("\r\n\r\n");
      std::size_t skip = 4;
      if (sep == std::string::npos) {
        sep = block.find("\n\n");
        skip = 2;
      }
      record.url = uri;
      record.payload = sep == std::string::npos ? std::string{} : block.substr(sep + skip);
      return true;
    }
    if (type == "resource") {
      record.url = uri;
      record.payload = std::move(block);
      return true;
    }
  }
  return false;
}

void write_warc_gz(const std::string& path, const std::vector<ArchiveRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FatalError("cannot write " + path);
  for (const auto& r : records) {
    const std::string http = "HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\nContent-Length: " +
                             std::to_string(r.payload.size()) + "\r\n\r\n" + r.payload;
    const std::string rec = "WARC/1.0\r\nWARC-Type: response\r\nWARC-Target-URI: " + r.url +
                            "\r\nContent-Type: application/http; msgtype=response\r\nContent-Length: " +
                            std::to_string(http.size()) + "\r\n\r\n" + http + "\r\n\r\n";
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
      throw Error("zlib init failed");
    std::string gz(deflateBound(&zs, static_cast<uLong>(rec.size())) + 64, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(rec.data()));
    zs.avail_in = static_cast<uInt>(rec.size());
    zs.next_out = reinterpret_cast<Bytef*>(gz.data());
    zs.avail_out = static_cast<uInt>(gz.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("zlib deflate failed");
    out.write(gz.data(), static_cast<std::streamsize>(zs.total_out));
  }
}

std::uint64_t for_each_archive_record(const std::string& path, const std::function<void(const ArchiveRecord&)>& visit) {
  std::uint64_t unreadable = 0;
  auto read_warc = [&](const std::string& file) {
    WarcReader reader(file);
    ArchiveRecord rec;
    while (reader.next(rec)) visit(rec);
    if (reader.malformed()) ++unreadable;
  };
  if (!fs::is_directory(path)) {
    read_warc(path);
    return unreadable;
  }
  if (fs::exists(fs::path(path) / "manifest.jsonl")) {
    for (const auto& e : read_snapshot_manifest(path)) {
      std::ifstream in(fs::path(path) / e.file, std::ios::binary);
      if (!in) {
        ++unreadable;
        continue;
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      visit({e.url, ss.str()});
    }
    return unreadable;
  }
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(path)) {
    const std::string name = de.path().filename().string();
    if (de.is_regular_file() && (name.ends_with(".warc") || name.ends_with(".warc.gz"))) files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) read_warc(f.string());
  return unreadable;
}

}  // namespace localmine
