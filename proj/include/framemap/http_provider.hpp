#pragma once

// HTTP embedding client. Talks to a service exposing
//   POST /embed  {"model": <id>, "texts": [...]}  ->  {"vectors": [[...], ...]}
// so a real sentence-embedding model can be dropped in behind the same
// provider contract the offline fallback uses.

#include <stdexcept>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "framemap/embedding.hpp"

namespace framemap::embed {

class HttpProvider final : public EmbeddingProvider {
public:
    HttpProvider(std::string host, int port, std::string model_id)
        : host_(std::move(host)), port_(port), model_id_(std::move(model_id)) {}

    const std::string& model_id() const override { return model_id_; }
    bool deterministic() const override { return false; }

    std::vector<Vector> embed(const std::vector<std::string>& texts) override {
        httplib::Client client(host_, port_);
        client.set_read_timeout(300, 0);
        nlohmann::json req{{"model", model_id_}, {"texts", texts}};
        auto res = client.Post("/embed", req.dump(), "application/json");
        if (!res) {
            throw std::runtime_error("embedding endpoint unreachable: " + host_ + ":" +
                                     std::to_string(port_));
        }
        if (res->status != 200) {
            throw std::runtime_error("embedding endpoint returned status " +
                                     std::to_string(res->status));
        }
        nlohmann::json body = nlohmann::json::parse(res->body);
        return body.at("vectors").get<std::vector<Vector>>();
    }

private:
    std::string host_;
    int port_;
    std::string model_id_;
};

}  // namespace framemap::embed
