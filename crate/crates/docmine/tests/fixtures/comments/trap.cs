// s01 using
using System;
/* s02 block
   more */
class Trap {
    string a = "// trap one";
    string b = @"// trap two "" /* nested */";
    // s03 plain
    string c = $"{x} // trap three";
    string d = $@"/* trap four */";
    char q = '"'; // s04 char quote
    /// s05 xml doc
    void M() {
        // s06 plain
        /* s07 inline */ int k = 0; // s08 tail
        string e = "escape \" // trap five";
        // s09 plain
        /* s10 block */
        // s11 plain
        // s12 plain
        /* s13 spans
           lines */
        // s14 plain
        char r = '\''; // s15 escaped char
        // s16 plain
        // s17 plain
        /* s18 block */
        // s19 plain
    } // s20 close
}
