#pragma once

// httplib-backed transport for live metadata fetches. Only the CLI includes
// this; the library and tests stay network-free behind the Transport seam.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <string>

#include "corpus_io.hpp"

namespace frontier_audit::corpus {

class HttpTransport : public Transport {
  public:
    HttpResponse get(const std::string& host, const std::string& path,
                     const std::string& contact) override {
        httplib::SSLClient client(host);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        client.set_follow_location(true);
        httplib::Headers headers;
        std::string agent = "frontier-audit/0.1";
        if (!contact.empty()) agent += " (mailto:" + contact + ")";
        headers.emplace("User-Agent", agent);
        auto res = client.Get(path, headers);
        if (!res) throw TransportError("no response from " + host + path);
        return {res->status, res->body};
    }
};

}  // namespace frontier_audit::corpus
