from arpersist.cli import main

raise SystemExit(main())
