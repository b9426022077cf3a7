// Turbo path for the render api endpoint.
/* The method caches each request parameter; a fault in the
   interface returns an error. */
int turbo() {
    const char* raw = R"(// not a comment)";
    return 0; // usage: return the call status
}
