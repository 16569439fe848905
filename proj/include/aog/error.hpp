#pragma once
#include <stdexcept>
#include <string>

namespace aog {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DepthExceeded : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class InvalidTree : public Error { public: using Error::Error; };
class InvalidSample : public Error { public: using Error::Error; };
class UnsupportedGrammar : public Error { public: using Error::Error; };
class NotGcnf : public Error { public: using Error::Error; };
class UnitCycle : public UnsupportedGrammar { public: using UnsupportedGrammar::UnsupportedGrammar; };
class MapMismatch : public Error { public: using Error::Error; };
class BudgetExceeded : public Error { public: using Error::Error; };
class MissingEntry : public Error { public: using Error::Error; };
class FormatError : public Error { public: using Error::Error; };
class InvalidModel : public Error { public: using Error::Error; };

} // namespace aog
