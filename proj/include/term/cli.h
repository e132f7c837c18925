#ifndef TERM_CLI_H_
#define TERM_CLI_H_

// The `term` command line: match, ana, acabit, promethee, serve.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error
// (unreadable or malformed input, with path and line where known).
//
// Every subcommand takes `--config FILE`, a JSON object whose keys are long
// flag names without dashes ({"k": 4, "stopwords": "fr.txt"}). Flags given
// on the command line win over the file. Relative paths in the file resolve
// against the file's directory.

#include <ostream>

namespace term {

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace term

#endif  // TERM_CLI_H_
