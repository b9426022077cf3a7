// c01 includes ahead
#include <string>
/* c02 block
   second line */
int main() {
    std::string a = "// trap one";
    std::string b = "/* trap two */";
    char q = '"'; // c03 char quote
    std::string c = R"(// trap three)";
    int n = 1'000'000; // c04 digit separator
    std::string d = "escape \" // trap four";
    // c05 plain
    /* c06 inline */ int k = 0; // c07 tail
    const char* e = "back\\slash";
    // c08 plain
    // c09 plain
    /* c10 one-line block */
    std::string f = u8R"x(/* trap five */)x";
    // c11 plain
    // c12 plain
    /* c13 spans
       two lines */
    // c14 plain
    char r = '\''; // c15 escaped char
    // c16 plain
    // c17 plain
    /* c18 block */
    // c19 plain
    // c20 final
    return 0;
}
