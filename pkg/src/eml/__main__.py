from .cli import eml_main

raise SystemExit(eml_main())
