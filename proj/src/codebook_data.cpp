// Built-in failure codebook. Rules are data: one tab-separated row per rule,
// ordered, first match wins. Edit a dumped copy and pass it via --codebook to
// tune classification without rebuilding.
#include <string>

#include "xlate/taxonomy.hpp"

namespace xlate {

namespace {

const char* const kLines[] = {
    "# failure codebook",
    "# version: 1.0.0",
    "# columns: rule_id\tstage\tlang\tsubtype\tpattern\trationale",
    "# Rules are matched in order against the evidence line of the diagnostic;",
    "# the first hit decides the subtype. Patterns are case-insensitive regexes.",
    "",
    "# --- compile, Java (javac diagnostics) ---",
    "cj-import-package\tcompile\tjava\tCE1\tpackage [\\w.]+ does not exist\tunresolved package on the import path",
    "cj-import-symbol\tcompile\tjava\tCE1\tcannot find symbol\tmissing symbol; includes identifiers never declared",
    "cj-lex-char\tcompile\tjava\tCE2\tillegal character\tscanner rejected a character",
    "cj-lex-unmappable\tcompile\tjava\tCE2\tunmappable character\tencoding-level token damage",
    "cj-inc-eof\tcompile\tjava\tCE3\treached end of file while parsing\tunterminated block at EOF",
    "cj-inc-unclosed\tcompile\tjava\tCE3\tunclosed (string literal|character literal|comment)\tunterminated literal or comment",
    "cj-inc-delim\tcompile\tjava\tCE3\t'(;|\\)|\\}|\\])' expected\tmissing delimiter; half-formed statement",
    "cj-struct-noclass\tcompile\tjava\tCE4\tno class declaration found\toutput has no type declaration to compile",
    "cj-struct-toplevel\tcompile\tjava\tCE4\tclass, interface, (or enum|enum, or record) expected\tbroken top-level shape",
    "cj-struct-decl\tcompile\tjava\tCE4\tinvalid method declaration|missing method body|illegal start of (type|expression)|<identifier> expected|missing return statement|return outside method\tmalformed declaration or member",
    "cj-type-incompat\tcompile\tjava\tCE5\tincompatible types|inconvertible types|incomparable types\ttype mismatch the compiler cannot bridge",
    "cj-type-overload\tcompile\tjava\tCE5\tno suitable (method|constructor)|cannot be applied to|bad operand type|cannot be dereferenced\toverload or operator resolution failed",
    "cj-lit-range\tcompile\tjava\tCE6\tinteger number too large|floating-point number too (large|small)\tliteral outside the representable range",
    "cj-lit-form\tcompile\tjava\tCE6\tillegal escape character|empty character literal\tmalformed literal form",
    "",
    "# --- compile, Python (syntax/bytecode check diagnostics) ---",
    "cp-import\tcompile\tpython\tCE1\tModuleNotFoundError|ImportError\timport resolution surfaced at check time",
    "cp-lex-char\tcompile\tpython\tCE2\tinvalid character|invalid non-printable character\tscanner rejected a character",
    "cp-lex-token\tcompile\tpython\tCE2\tinvalid token\tscanner-level token error",
    "cp-inc-eof\tcompile\tpython\tCE3\tunexpected EOF|EOF in multi-line|was never closed|unterminated (string|triple-quoted string)\tunterminated construct",
    "cp-struct-indent\tcompile\tpython\tCE4\tIndentationError|TabError\tindentation defines structure; treated as shape damage",
    "cp-struct-stmt\tcompile\tpython\tCE4\t'(return|break|continue|yield)' outside|cannot assign to|invalid syntax\tstatement outside a legal shape; bare invalid syntax is structural by convention here",
    "cp-lit\tcompile\tpython\tCE6\tleading zeros in decimal integer|invalid (decimal|hexadecimal|octal|binary|imaginary) literal\tmalformed numeric literal",
    "",
    "# --- compile, both: terminal catch-all ---",
    "ce-residual\tcompile\tany\tCE7\t.*\tresidual compile diagnostics",
    "",
    "# --- runtime, Python (stderr tracebacks) ---",
    "rp-dep-import\truntime\tpython\tRE1\tModuleNotFoundError|ImportError\tprogram cannot find a module it needs",
    "rp-dep-entry\truntime\tpython\tRE1\tcan't open file|can't find '__main__'\tprogram cannot start",
    "rp-parse-convert\truntime\tpython\tRE2\tinvalid literal for int|could not convert string to\tvalue conversion from input failed",
    "rp-parse-eof\truntime\tpython\tRE2\tEOFError\tran out of input while reading",
    "rp-parse-unpack\truntime\tpython\tRE2\t(not enough|too many) values to unpack\tinput tokenization shape mismatch",
    "rp-index\truntime\tpython\tRE3\tIndexError|KeyError\tout-of-range index or missing key",
    "rp-ref-name\truntime\tpython\tRE4\tNameError|UnboundLocalError\tvalue unset or out of scope",
    "rp-ref-attr\truntime\tpython\tRE4\tAttributeError\toperation on a value that does not support it",
    "rp-arith\truntime\tpython\tRE5\tZeroDivisionError|OverflowError|FloatingPointError\tillegal or unstable numeric work",
    "rp-resource\truntime\tpython\tRE6\tRecursionError|MemoryError\tunbounded recursion or growth",
    "",
    "# --- runtime, Java (stderr traces) ---",
    "rj-dep-entry\truntime\tjava\tRE1\tMain method not found|Could not find or load main class|NoClassDefFoundError|ClassNotFoundException|UnsatisfiedLinkError\tprogram cannot start or load what it needs",
    "rj-parse-convert\truntime\tjava\tRE2\tNumberFormatException|InputMismatchException|NoSuchElementException|DateTimeParseException\tinput reading/conversion; Scanner exhaustion lands here, ahead of any reference rule",
    "rj-index\truntime\tjava\tRE3\tIndexOutOfBoundsException\tout-of-range access; covers array and string variants",
    "rj-ref-null\truntime\tjava\tRE4\tNullPointerException\tvalue unset or not yet built",
    "rj-ref-state\truntime\tjava\tRE4\tIllegalStateException|ConcurrentModificationException|ClassCastException|UnsupportedOperationException\ttarget blocks the operation or state is invalid",
    "rj-arith\truntime\tjava\tRE5\tArithmeticException\tillegal numeric work",
    "rj-resource\truntime\tjava\tRE6\tStackOverflowError|OutOfMemoryError\trecursion or growth drained a resource",
    "",
    "# --- runtime, both: reference-shaped residue only; anything else stays unclassified ---",
    "re-ref-shaped\truntime\tany\tRE4\t\\bnull\\b|not defined|undefined|unbound|uninitialized|referenced before|no attribute\tresidual trace that still looks like a broken reference",
};

}  // namespace

const std::string& builtin_codebook_text() {
  static const std::string text = [] {
    std::string out;
    for (const char* line : kLines) {
      out += line;
      out += '\n';
    }
    return out;
  }();
  return text;
}

}  // namespace xlate
