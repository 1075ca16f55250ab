#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "localmine/discovery.hpp"

namespace localmine {

/// Sequential reader for WARC files, gzip-compressed (per-record members
/// or whole-file) or plain. Yields response and resource records; the
/// HTTP header block of response records is stripped from the payload.
class WarcReader {
 public:
  explicit WarcReader(const std::string& path);
  ~WarcReader();
  WarcReader(const WarcReader&) = delete;
  WarcReader& operator=(const WarcReader&) = delete;

  bool next(ArchiveRecord& record);
  /// Set when reading stopped at a structurally broken record.
  bool malformed() const { return malformed_; }

 private:
  bool read_line(std::string& line);
  bool read_exact(std::size_t n, std::string& out);

  void* gz_ = nullptr;
  std::string buf_;
  std::size_t pos_ = 0;
  bool eof_ = false;
  bool malformed_ = false;
};

/// Writes response records as one gzip member each.
void write_warc_gz(const std::string& path, const std::vector<ArchiveRecord>& records);

/// Visits every record of an archive input: a WARC file, a directory with a
/// snapshot-style manifest.jsonl (directory-of-files mode), or a directory of
/// WARC files. Returns the number of records that could not be read.
std::uint64_t for_each_archive_record(const std::string& path, const std::function<void(const ArchiveRecord&)>& visit);

}  // namespace localmine
