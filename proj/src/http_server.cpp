// Eigen must come before httplib: <resolv.h> defines a `_res` macro.
#include "proact/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>

namespace proact {

void serveHttp(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto handler = [&service](const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    req.body = in.body;
    for (const auto& [k, v] : in.params) req.query[k] = v;
    for (const auto& [k, v] : in.headers) {
      std::string name = k;
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
      req.headers[name] = v;
    }
    const Response r = service.handle(req);
    out.status = r.status;
    out.set_content(r.body, r.contentType);
  };
  server.Get(R"(.*)", handler);
  server.Post(R"(.*)", handler);
  if (!server.listen(host, port)) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace proact
